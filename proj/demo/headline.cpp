// Runs the full claim suite on the built-in 13-ray set and prints the report.
#include <iostream>

#include <ksv/ksv.hpp>

int main() {
  ksv::RaySet rs = ksv::yu_oh_13();
  ksv::Report report = ksv::run_verify(rs);
  report.command = "demo/headline";
  std::cout << ksv::render_text(report);
  return report.passed() ? 0 : 1;
}
