#ifndef HJRA_ERRORS_HPP
#define HJRA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hjra {

// Bad configuration or a violated call contract. The CLI maps this to exit
// code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, CFL violations and other mid-solve failures. The CLI
// maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hjra

#endif
