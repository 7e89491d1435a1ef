#include "mew/errors.hpp"

#include <sstream>

namespace mew {

namespace {

std::string at_point(std::array<double, 2> p, const std::string& what) {
  std::ostringstream os;
  os << (what.empty() ? "degenerate division" : what) << " at (" << p[0] << ", " << p[1] << ")";
  return os.str();
}

std::string expected_list(const std::vector<std::string>& expected) {
  std::string s;
  for (std::size_t i = 0; i < expected.size(); ++i) s += (i ? ", " : "") + expected[i];
  return s;
}

}  // namespace

DegenerateDivision::DegenerateDivision(std::array<double, 2> b, std::string what)
    : Error(at_point(b, what)), base(b) {}

OrderExceeded::OrderExceeded(int req, int avail)
    : Error("derivative of order " + std::to_string(req) + " requested from a jet of order " +
            std::to_string(avail) + "; raise the jet order"),
      requested(req),
      available(avail) {}

ExprError::ExprError(const std::string& msg, std::size_t off)
    : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off), detail(msg) {}

SyntaxError::SyntaxError(std::size_t off, std::vector<std::string> exp, std::string f)
    : ExprError("syntax error: found '" + f + "', expected one of {" + expected_list(exp) + "}", off),
      expected(std::move(exp)),
      found(std::move(f)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t off, std::string n)
    : ExprError("unknown identifier '" + n + "'", off), name(std::move(n)) {}

}  // namespace mew
