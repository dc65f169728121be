#include <w3a/cli.hpp>

#include <csignal>
#include <iostream>

int main(int argc, char** argv)
{
  auto const on_signal = [](int) { w3a::cli::request_stop(); };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  return w3a::cli::run(argc, argv, std::cout, std::cerr);
}
