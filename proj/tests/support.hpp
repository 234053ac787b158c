#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rehand/bytes.hpp"

namespace testsupport {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

/// Lines of a committed fixture, split on '|'.
inline std::vector<std::vector<std::string>> fixture(const std::string& name) {
    std::ifstream in(std::string(REHAND_FIXTURE_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(split(line, '|'));
    }
    return rows;
}

inline std::vector<rehand::Bytes> hex_list(const std::string& s) {
    std::vector<rehand::Bytes> out;
    if (s.empty()) return out;
    for (const auto& h : split(s, ',')) out.push_back(h == "-" ? rehand::Bytes{} : rehand::from_hex(h));
    return out;
}

template <class B>
B block(const std::string& hex) {
    return B::from_view(rehand::from_hex(hex));
}

}  // namespace testsupport
