#include "parallel_spectra/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "parallel_spectra/errors.hpp"

namespace paraspec {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc())
        throw Error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("atomic_write_file: cannot open " + tmp.string());
        out << content;
        if (!out.flush()) throw Error("atomic_write_file: write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("atomic_write_file: rename failed for " + path.string() + ": " +
                        ec.message());
}

} // namespace paraspec
