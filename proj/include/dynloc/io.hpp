#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dynloc {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Numbers are written with "%.17g" so that a parse reproduces the double.
std::string format_number(double v);

/// Files written into one output directory. If the set is destroyed before
/// commit(), every file it created is removed again, so an aborted run
/// leaves no partial outputs behind.
class ArtifactSet {
public:
    explicit ArtifactSet(std::filesystem::path out_dir);
    ~ArtifactSet();
    ArtifactSet(const ArtifactSet&) = delete;
    ArtifactSet& operator=(const ArtifactSet&) = delete;

    const std::filesystem::path& directory() const { return dir_; }

    /// Headered CSV, one row per entry of `rows`.
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

    /// Same, from equal-length columns.
    void write_columns(const std::string& name, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns);

    /// Flat "key = value" text.
    void write_key_values(const std::string& name, const KeyValues& entries);

    void commit() { committed_ = true; }

    /// File names written so far, in order.
    const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path target(const std::string& name);

    std::filesystem::path dir_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

KeyValues read_key_values(const std::filesystem::path& path);

}  // namespace dynloc
