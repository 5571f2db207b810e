#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <openssl/evp.h>

namespace dts {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256 over OpenSSL's EVP interface.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new())
    {
        if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256: init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::span<const std::uint8_t> bytes)
    {
        if (EVP_DigestUpdate(ctx_, bytes.data(), bytes.size()) != 1)
            throw std::runtime_error("sha256: update failed");
        return *this;
    }

    Sha256& update(std::string_view s)
    {
        return update({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    }

    Sha256& update_u64(std::uint64_t v)
    {
        std::array<std::uint8_t, 8> b{};
        for (int i = 0; i < 8; ++i)
            b[i] = static_cast<std::uint8_t>(v >> (8 * (7 - i)));
        return update(b);
    }

    Sha256& update_f64(double v)
    {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        return update_u64(bits);
    }

    Digest finish()
    {
        Digest out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, out.data(), &len) != 1 || len != out.size())
            throw std::runtime_error("sha256: final failed");
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

inline Digest sha256(std::string_view s)
{
    return Sha256{}.update(s).finish();
}

inline std::string to_hex(const Digest& d)
{
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto b : d) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0xf]);
    }
    return s;
}

} // namespace dts
