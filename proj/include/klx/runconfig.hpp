#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace klx {

// Shared CLI/config-file settings. Config files are line-oriented
// `key = value`; flags override file entries; KLX_SEED supplies the default
// seed. canonical() serializes deterministically (fixed key order,
// round-trippable numbers).
struct RunConfig {
    std::string process = "bridge";
    std::string weight = "const1";
    double alpha = 0.0;
    int count = 10;
    long long paths = 10000;
    int terms = 0;  // 0 = default truncation rule
    std::vector<double> eps;
    std::uint64_t seed = 1;
    int grid = 1000;
    std::string method = "analytic";  // analytic | nystrom
    std::string form = "auto";        // theorem1 | theorem2 | theorem3 | auto
    std::string suite = "all";
    std::string out = "-";
    std::string format = "csv";  // csv | json
    double slepian_c = 1.0;
    std::string kernel_csv;

    void set(const std::string& key, const std::string& value);
    std::string canonical() const;
};

RunConfig parse_config_file(const std::string& path, std::set<std::string>* keys_seen = nullptr);
RunConfig parse_config_text(const std::string& text, std::set<std::string>* keys_seen = nullptr);

}  // namespace klx
