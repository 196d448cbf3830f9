#pragma once

#include <string>
#include <vector>

namespace vqalab::app {

// Turns a results CSV into per-category gnuplot bar data (<prefix>_all.dat,
// _yes_no, _number, _other; "label value" lines with cells passed through
// verbatim), or a loss CSV into <prefix>_loss.dat. Returns the written paths.
std::vector<std::string> write_plot_data(const std::string& csv_path,
                                         const std::string& out_prefix);

}  // namespace vqalab::app
