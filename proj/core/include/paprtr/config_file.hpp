#ifndef PAPRTR_CONFIG_FILE_HPP
#define PAPRTR_CONFIG_FILE_HPP

/**
 * @file config_file.hpp
 * @brief Campaign configuration as a key=value file.
 *
 * Format: one `key = value` pair per line, `#` starts a comment, blank lines
 * ignored. Unknown keys are rejected. The keys and their meanings are listed
 * in the project README.
 */

#include <filesystem>
#include <istream>
#include <stdexcept>

#include "paprtr/montecarlo.hpp"

namespace paprtr {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse a config stream on top of the given defaults.
CampaignConfig parse_campaign_config(std::istream& is, CampaignConfig base = {});

/// Load from a file. @throws ConfigError if the file is missing or invalid.
CampaignConfig load_campaign_config(const std::filesystem::path& path, CampaignConfig base = {});

}  // namespace paprtr

#endif  // PAPRTR_CONFIG_FILE_HPP
