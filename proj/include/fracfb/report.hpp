// Ordered key-value metrics document. Values are serialized with %.17g so
// identical runs produce byte-identical files.
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fracfb {

class Report {
  public:
    Report() { put("schema_version", 1L); }

    void put(const std::string& key, const std::string& value);
    void put(const std::string& key, const char* value);
    void put(const std::string& key, double value);
    void put(const std::string& key, long value);
    void put(const std::string& key, int value) { put(key, static_cast<long>(value)); }
    void put(const std::string& key, bool value);

    std::string serialize() const;

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

  private:
    std::vector<std::pair<std::string, std::string>> items_;
};

std::string format_double(double v);

} // namespace fracfb
