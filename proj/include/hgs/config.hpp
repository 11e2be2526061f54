// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace hgs {

// Tiny key=value config reader. '#' starts a comment, blank lines are
// ignored. Unknown keys are rejected by finish() so typos fail loudly.
class KeyValueFile {
public:
    explicit KeyValueFile(const std::string& path);

    void get(const std::string& key, int& out);
    void get(const std::string& key, uint64_t& out);
    void get(const std::string& key, double& out);
    void get(const std::string& key, bool& out);
    void get(const std::string& key, std::string& out);

    // Throws FormatError listing any key that was never consumed.
    void finish() const;

private:
    const std::string* find(const std::string& key);

    std::string path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> used_;
};

}  // namespace hgs
