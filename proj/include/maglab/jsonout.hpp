#pragma once

// Minimal canonical JSON emitter. Field order is insertion order and floats
// are printed with 17 significant digits, so parsing an output and
// re-serializing it reproduces the bytes exactly.

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace maglab {

inline std::string format_double17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class JsonWriter {
  public:
    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(std::string_view k) {
        separate();
        append_string(k);
        out_ += ':';
        pending_value_ = true;
    }

    void value(double v) { scalar(format_double17(v)); }
    void value(int64_t v) { scalar(std::to_string(v)); }
    void value(uint64_t v) { scalar(std::to_string(v)); }
    void value(int v) { scalar(std::to_string(int64_t(v))); }
    void value(bool v) { scalar(v ? "true" : "false"); }
    void value(const char* v) { value(std::string_view(v)); }
    void value(std::string_view v) {
        separate();
        append_string(v);
        pending_value_ = false;
    }
    void value_null() { scalar("null"); }

    const std::string& str() const { return out_; }

  private:
    void open(char c) {
        separate();
        out_ += c;
        first_.push_back(true);
        pending_value_ = false;
    }
    void close(char c) {
        out_ += c;
        first_.pop_back();
    }
    void separate() {
        if (pending_value_) return;  // value directly after its key
        if (!first_.empty()) {
            if (!first_.back()) out_ += ',';
            first_.back() = false;
        }
    }
    void scalar(const std::string& text) {
        separate();
        out_ += text;
        pending_value_ = false;
    }
    void append_string(std::string_view s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default: out_ += c;
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

}  // namespace maglab
