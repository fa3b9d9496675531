#include "hdseizure/binary_io.hpp"

#include <array>
#include <bit>
#include <istream>
#include <ostream>

#include "hdseizure/errors.hpp"

namespace hdseizure::binio {
namespace {

template <typename U>
void WriteLE(std::ostream& out, U v) {
  std::array<char, sizeof(U)> buf{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  out.write(buf.data(), buf.size());
}

template <typename U>
U ReadLE(std::istream& in) {
  std::array<char, sizeof(U)> buf{};
  ReadBytes(in, buf.data(), buf.size());
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void ReadBytes(std::istream& in, char* dst, std::size_t n) {
  const auto offset = static_cast<std::uint64_t>(std::max<std::streamoff>(in.tellg(), 0));
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw ParseError("unexpected end of file: wanted " + std::to_string(n) + " bytes", offset);
  }
}

void WriteU8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }
void WriteU32(std::ostream& out, std::uint32_t v) { WriteLE(out, v); }
void WriteU64(std::ostream& out, std::uint64_t v) { WriteLE(out, v); }
void WriteI32(std::ostream& out, std::int32_t v) { WriteLE(out, static_cast<std::uint32_t>(v)); }
void WriteI64(std::ostream& out, std::int64_t v) { WriteLE(out, static_cast<std::uint64_t>(v)); }
void WriteF64(std::ostream& out, double v) { WriteLE(out, std::bit_cast<std::uint64_t>(v)); }

void WriteString(std::ostream& out, const std::string& s) {
  WriteU32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint8_t ReadU8(std::istream& in) { return ReadLE<std::uint8_t>(in); }
std::uint32_t ReadU32(std::istream& in) { return ReadLE<std::uint32_t>(in); }
std::uint64_t ReadU64(std::istream& in) { return ReadLE<std::uint64_t>(in); }
std::int32_t ReadI32(std::istream& in) { return static_cast<std::int32_t>(ReadLE<std::uint32_t>(in)); }
std::int64_t ReadI64(std::istream& in) { return static_cast<std::int64_t>(ReadLE<std::uint64_t>(in)); }
double ReadF64(std::istream& in) { return std::bit_cast<double>(ReadLE<std::uint64_t>(in)); }

std::string ReadString(std::istream& in) {
  const std::uint32_t n = ReadU32(in);
  if (n > (1U << 24)) {
    throw ParseError("string length " + std::to_string(n) + " is implausible",
                     static_cast<std::uint64_t>(in.tellg()));
  }
  std::string s(n, '\0');
  ReadBytes(in, s.data(), n);
  return s;
}

}  // namespace hdseizure::binio
