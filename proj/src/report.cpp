#include "fracfb/report.hpp"

#include <cstdio>

namespace fracfb {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

void Report::put(const std::string& key, const std::string& value) {
    items_.emplace_back(key, value);
}

void Report::put(const std::string& key, const char* value) {
    items_.emplace_back(key, std::string(value));
}

void Report::put(const std::string& key, double value) {
    items_.emplace_back(key, format_double(value));
}

void Report::put(const std::string& key, long value) {
    items_.emplace_back(key, std::to_string(value));
}

void Report::put(const std::string& key, bool value) {
    items_.emplace_back(key, value ? "true" : "false");
}

std::string Report::serialize() const {
    std::string out;
    for (const auto& kv : items_) {
        out += kv.first;
        out += " = ";
        out += kv.second;
        out += '\n';
    }
    return out;
}

} // namespace fracfb
