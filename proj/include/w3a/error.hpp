#pragma once

#include <stdexcept>
#include <string>

namespace w3a
{
// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};
}
