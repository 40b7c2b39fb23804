// csv.hpp — versioned CSV emission with atomic write-then-rename

#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmet::csv {

inline constexpr const char* kSchemaHeader = "# qmet-csv v1";

class Writer {
  public:
    explicit Writer(std::vector<std::string> columns) : columns_(std::move(columns)) {
        stream_ << kSchemaHeader << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i)
            stream_ << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
        stream_ << std::setprecision(17);
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        if (sizeof...(values) != columns_.size())
            throw std::invalid_argument("csv row width mismatch");
        std::size_t i = 0;
        ((stream_ << values << (++i < sizeof...(values) ? "," : "\n")), ...);
    }

    void comment(const std::string& text) { stream_ << "# " << text << '\n'; }

    // Preassembled comma-separated line (for wide rows built in a loop)
    void raw_row(const std::string& line) { stream_ << line << '\n'; }

    // Write to <path>.tmp then rename, so partial files never appear.
    void save(const std::string& path) const {
        const std::filesystem::path target(path);
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
        const std::filesystem::path tmp = target.string() + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
            out << stream_.str();
        }
        std::filesystem::rename(tmp, target);
    }

    std::string str() const { return stream_.str(); }

  private:
    std::vector<std::string> columns_;
    std::ostringstream stream_;
};

} // namespace qmet::csv
