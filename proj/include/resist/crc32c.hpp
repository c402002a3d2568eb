#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace resist {

// CRC-32C (Castagnoli, polynomial 0x1EDC6F41, reflected), table-driven.
class Crc32c {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        std::uint32_t crc = ~state_;
        for (std::size_t i = 0; i < len; ++i)
            crc = table()[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
        state_ = ~crc;
    }

    std::uint32_t value() const { return state_; }

private:
    static const std::array<std::uint32_t, 256>& table() {
        static const std::array<std::uint32_t, 256> t = [] {
            std::array<std::uint32_t, 256> tt{};
            for (std::uint32_t i = 0; i < 256; ++i) {
                std::uint32_t c = i;
                for (int k = 0; k < 8; ++k)
                    c = (c & 1) ? 0x82F63B78u ^ (c >> 1) : (c >> 1);
                tt[i] = c;
            }
            return tt;
        }();
        return t;
    }

    std::uint32_t state_ = 0;
};

inline std::uint32_t crc32c(const void* data, std::size_t len) {
    Crc32c c;
    c.update(data, len);
    return c.value();
}

}  // namespace resist
