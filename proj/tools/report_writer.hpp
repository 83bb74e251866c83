#ifndef BTQ_TOOLS_REPORT_WRITER_HPP
#define BTQ_TOOLS_REPORT_WRITER_HPP

#include <complex>
#include <cstdio>
#include <memory>
#include <string>
#include <variant>
#include <vector>

// Minimal ordered JSON writer for reports: insertion order is preserved and
// every number is emitted with 17 significant digits, so identical runs produce
// byte-identical files and values round-trip exactly.
namespace btq::tools {

class JsonValue;
using JsonPtr = std::shared_ptr<JsonValue>;

class JsonValue {
public:
  using Object = std::vector<std::pair<std::string, JsonPtr>>;
  using Array = std::vector<JsonPtr>;

  static JsonPtr object() {
    auto v = std::make_shared<JsonValue>();
    v->data_ = Object{};
    return v;
  }
  static JsonPtr array() {
    auto v = std::make_shared<JsonValue>();
    v->data_ = Array{};
    return v;
  }
  static JsonPtr str(std::string s) {
    auto v = std::make_shared<JsonValue>();
    v->data_ = std::move(s);
    return v;
  }
  static JsonPtr number(double d) {
    auto v = std::make_shared<JsonValue>();
    v->data_ = d;
    return v;
  }
  static JsonPtr integer(long long i) {
    auto v = std::make_shared<JsonValue>();
    v->data_ = i;
    return v;
  }
  static JsonPtr boolean(bool b) {
    auto v = std::make_shared<JsonValue>();
    v->data_ = b;
    return v;
  }
  static JsonPtr complex(std::complex<double> c) {
    auto v = array();
    v->push(number(c.real()));
    v->push(number(c.imag()));
    return v;
  }

  void set(const std::string& key, JsonPtr value) { std::get<Object>(data_).emplace_back(key, std::move(value)); }
  void push(JsonPtr value) { std::get<Array>(data_).push_back(std::move(value)); }

  static std::string format_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
  }

  void dump(std::string& out, int indent = 0) const {
    auto pad = [&](int n) { out.append(static_cast<size_t>(2 * n), ' '); };
    if (std::holds_alternative<Object>(data_)) {
      const auto& obj = std::get<Object>(data_);
      if (obj.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (size_t i = 0; i < obj.size(); ++i) {
        pad(indent + 1);
        out += '"' + escape(obj[i].first) + "\": ";
        obj[i].second->dump(out, indent + 1);
        if (i + 1 < obj.size()) out += ',';
        out += '\n';
      }
      pad(indent);
      out += '}';
    } else if (std::holds_alternative<Array>(data_)) {
      const auto& arr = std::get<Array>(data_);
      if (arr.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (size_t i = 0; i < arr.size(); ++i) {
        arr[i]->dump(out, indent);
        if (i + 1 < arr.size()) out += ", ";
      }
      out += ']';
    } else if (std::holds_alternative<std::string>(data_)) {
      out += '"' + escape(std::get<std::string>(data_)) + '"';
    } else if (std::holds_alternative<double>(data_)) {
      out += format_double(std::get<double>(data_));
    } else if (std::holds_alternative<long long>(data_)) {
      out += std::to_string(std::get<long long>(data_));
    } else if (std::holds_alternative<bool>(data_)) {
      out += std::get<bool>(data_) ? "true" : "false";
    } else {
      out += "null";
    }
  }

private:
  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      switch (c) {
        case '"': r += "\\\""; break;
        case '\\': r += "\\\\"; break;
        case '\n': r += "\\n"; break;
        default: r += c;
      }
    }
    return r;
  }

  std::variant<std::monostate, Object, Array, std::string, double, long long, bool> data_;
};

} // namespace btq::tools

#endif
