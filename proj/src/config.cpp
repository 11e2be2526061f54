// SPDX-License-Identifier: Apache-2.0
#include "hgs/config.hpp"

#include <fstream>
#include <stdexcept>

#include "hgs/errors.hpp"

namespace hgs {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueFile::KeyValueFile(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw FormatError("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw FormatError(path + ":" + std::to_string(lineno) + ": empty key or value");
        if (values_.count(key))
            throw FormatError(path + ":" + std::to_string(lineno) + ": duplicate key " + key);
        values_[key] = val;
        used_[key] = false;
    }
}

const std::string* KeyValueFile::find(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_[key] = true;
    return &it->second;
}

void KeyValueFile::get(const std::string& key, int& out) {
    if (const std::string* v = find(key)) {
        try {
            std::size_t pos;
            out = std::stoi(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw FormatError(path_ + ": key " + key + ": not an integer: " + *v);
        }
    }
}

void KeyValueFile::get(const std::string& key, uint64_t& out) {
    if (const std::string* v = find(key)) {
        try {
            std::size_t pos;
            out = std::stoull(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw FormatError(path_ + ": key " + key + ": not an unsigned integer: " + *v);
        }
    }
}

void KeyValueFile::get(const std::string& key, double& out) {
    if (const std::string* v = find(key)) {
        try {
            std::size_t pos;
            out = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw FormatError(path_ + ": key " + key + ": not a number: " + *v);
        }
    }
}

void KeyValueFile::get(const std::string& key, bool& out) {
    if (const std::string* v = find(key)) {
        if (*v == "true" || *v == "1")
            out = true;
        else if (*v == "false" || *v == "0")
            out = false;
        else
            throw FormatError(path_ + ": key " + key + ": expected true/false: " + *v);
    }
}

void KeyValueFile::get(const std::string& key, std::string& out) {
    if (const std::string* v = find(key)) out = *v;
}

void KeyValueFile::finish() const {
    std::string unknown;
    for (const auto& [key, used] : used_)
        if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty()) throw FormatError(path_ + ": unknown keys: " + unknown);
}

}  // namespace hgs
