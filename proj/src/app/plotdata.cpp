#include "vqalab/app/plotdata.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "vqalab/common.hpp"

namespace vqalab::app {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw ConfigError("results csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::vector<std::string> write_plot_data(const std::string& csv_path,
                                         const std::string& out_prefix) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open csv: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv is empty: " + csv_path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);

    std::vector<std::vector<std::string>> body;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ConfigError("csv row " + std::to_string(body.size() + 2) + ": expected " +
                              std::to_string(header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        body.push_back(std::move(cells));
    }
    if (body.empty()) throw ConfigError("csv has no data rows: " + csv_path);

    std::vector<std::string> written;

    // Loss log pass-through.
    if (!header.empty() && header[0] == "step") {
        std::size_t ld = column(header, "l_d");
        std::size_t lg = column(header, "l_g");
        std::string path = out_prefix + "_loss.dat";
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write: " + path);
        out << "# step l_d l_g\n";
        for (const auto& row : body) out << row[0] << ' ' << row[ld] << ' ' << row[lg] << '\n';
        written.push_back(path);
        return written;
    }

    std::size_t c_method = column(header, "method");
    std::size_t c_arch = column(header, "arch");
    std::size_t c_noise = column(header, "noise");
    std::size_t c_comb = column(header, "combiner");
    std::size_t c_seed = column(header, "seed");
    std::map<std::string, std::size_t> cats = {{"all", column(header, "all")},
                                               {"yes_no", column(header, "yes_no")},
                                               {"number", column(header, "number")},
                                               {"other", column(header, "other")}};

    auto label = [&](const std::vector<std::string>& row) {
        std::string s = row[c_method];
        for (std::size_t c : {c_arch, c_noise, c_comb})
            if (row[c] != "-") s += "_" + row[c];
        return s + "_s" + row[c_seed];
    };

    for (const char* cat : {"all", "yes_no", "number", "other"}) {
        std::string path = out_prefix + "_" + cat + ".dat";
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write: " + path);
        out << "# label " << cat << '\n';
        for (const auto& row : body) out << label(row) << ' ' << row[cats[cat]] << '\n';
        written.push_back(path);
    }
    return written;
}

}  // namespace vqalab::app
