#pragma once

// Little-endian primitive readers/writers shared by the binary file formats.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace hdseizure::binio {

void WriteU8(std::ostream& out, std::uint8_t v);
void WriteU32(std::ostream& out, std::uint32_t v);
void WriteU64(std::ostream& out, std::uint64_t v);
void WriteI32(std::ostream& out, std::int32_t v);
void WriteI64(std::ostream& out, std::int64_t v);
void WriteF64(std::ostream& out, double v);
// u32 length prefix followed by the bytes.
void WriteString(std::ostream& out, const std::string& s);

std::uint8_t ReadU8(std::istream& in);
std::uint32_t ReadU32(std::istream& in);
std::uint64_t ReadU64(std::istream& in);
std::int32_t ReadI32(std::istream& in);
std::int64_t ReadI64(std::istream& in);
double ReadF64(std::istream& in);
std::string ReadString(std::istream& in);

// Reads exactly n bytes or throws ParseError at the current offset.
void ReadBytes(std::istream& in, char* dst, std::size_t n);

}  // namespace hdseizure::binio
