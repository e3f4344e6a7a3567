#include "dynloc/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <system_error>

#include "dynloc/errors.hpp"

namespace dynloc {

std::string format_number(double v)
{
    if (v == 0.0)
        return "0";  // no "-0"
    return fmt::format("{:.17g}", v);
}

ArtifactSet::ArtifactSet(std::filesystem::path out_dir) : dir_(std::move(out_dir))
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
        throw ConfigError("cannot create output directory " + dir_.string());
}

ArtifactSet::~ArtifactSet()
{
    if (committed_)
        return;
    for (const auto& f : files_) {
        std::error_code ec;
        std::filesystem::remove(dir_ / f, ec);
    }
}

std::filesystem::path ArtifactSet::target(const std::string& name)
{
    const std::filesystem::path p(name);
    if (name.empty() || p.has_parent_path() || p.is_absolute() || name == "." || name == "..")
        throw std::invalid_argument("artifact name must be a plain file name: '" + name + "'");
    files_.push_back(name);
    return dir_ / p;
}

void ArtifactSet::write_csv(const std::string& name, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows)
{
    const auto path = target(name);
    std::string text;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i)
            text += ',';
        text += header[i];
    }
    text += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument(name + ": row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                text += ',';
            text += format_number(row[i]);
        }
        text += '\n';
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

void ArtifactSet::write_columns(const std::string& name, const std::vector<std::string>& header,
                                const std::vector<std::vector<double>>& columns)
{
    if (columns.size() != header.size())
        throw std::invalid_argument(name + ": column count does not match header");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != n)
            throw std::invalid_argument(name + ": columns differ in length");
        for (std::size_t r = 0; r < n; ++r)
            rows[r][c] = columns[c][r];
    }
    write_csv(name, header, rows);
}

void ArtifactSet::write_key_values(const std::string& name, const KeyValues& entries)
{
    const auto path = target(name);
    std::ofstream out(path, std::ios::binary);
    for (const auto& [k, v] : entries)
        out << k << " = " << v << '\n';
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

KeyValues read_key_values(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    KeyValues out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos)
            continue;
        out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return out;
}

}  // namespace dynloc
