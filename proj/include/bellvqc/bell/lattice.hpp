#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellvqc/error.hpp"

namespace bellvqc::bell {

enum class Sublattice : char { A = 'A', B = 'B' };

/// One bond of the brick wall. `a` is always the A-sublattice site.
struct Link {
    std::size_t a = 0;
    std::size_t b = 0;
    char color = 'r';

    friend bool operator==(const Link &, const Link &) = default;
};

inline constexpr std::array<char, 3> link_colors{'r', 'b', 'g'};

class HoneycombLattice {
public:
    HoneycombLattice() = default;
    HoneycombLattice(std::vector<Sublattice> sublattice, std::vector<Link> links)
        : sublattice_(std::move(sublattice)), links_(std::move(links)) {
        validate();
    }

    [[nodiscard]] std::size_t num_sites() const noexcept { return sublattice_.size(); }
    [[nodiscard]] const std::vector<Sublattice> &sublattice() const noexcept { return sublattice_; }
    [[nodiscard]] const std::vector<Link> &links() const noexcept { return links_; }

    [[nodiscard]] std::size_t count(char color) const {
        std::size_t n = 0;
        for (const auto &l : links_) n += l.color == color ? 1 : 0;
        return n;
    }

    [[nodiscard]] std::vector<Link> links_of(char color) const {
        std::vector<Link> out;
        for (const auto &l : links_) {
            if (l.color == color) out.push_back(l);
        }
        return out;
    }

    void validate() const {
        if (sublattice_.empty()) throw InvalidArgument("lattice has no sites");
        const auto n = sublattice_.size();
        std::vector<std::array<int, 3>> used(n, {0, 0, 0});
        for (const auto &l : links_) {
            if (l.a >= n || l.b >= n) {
                throw InvalidArgument("link (" + std::to_string(l.a) + ", " +
                                      std::to_string(l.b) + ") references a missing site");
            }
            if (sublattice_[l.a] != Sublattice::A || sublattice_[l.b] != Sublattice::B) {
                throw InvalidArgument("link (" + std::to_string(l.a) + ", " +
                                      std::to_string(l.b) + ") is not A->B");
            }
            const int ci = color_index(l.color);
            for (auto s : {l.a, l.b}) {
                if (++used[s][ci] > 1) {
                    throw InvalidArgument("site " + std::to_string(s) + " has two '" +
                                          std::string(1, l.color) + "' links");
                }
            }
        }
    }

    [[nodiscard]] static int color_index(char c) {
        switch (c) {
        case 'r': return 0;
        case 'b': return 1;
        case 'g': return 2;
        default: throw InvalidArgument(std::string("unknown link color '") + c + "'");
        }
    }

private:
    std::vector<Sublattice> sublattice_;
    std::vector<Link> links_;
};

/// Rectangular brick-wall patch. Site (r, c) has index r*cols + c and is on
/// sublattice A when r + c is even. Horizontal bonds alternate b/g, vertical
/// bonds (r, c)-(r+1, c) exist for even r + c and are colored r.
[[nodiscard]] inline HoneycombLattice brick_wall(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0 || rows * cols < 2) {
        throw InvalidArgument("brick wall needs at least two sites");
    }
    auto idx = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
    std::vector<Sublattice> sub(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            sub[idx(r, c)] = (r + c) % 2 == 0 ? Sublattice::A : Sublattice::B;
        }
    }
    std::vector<Link> links;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            if ((r + c) % 2 == 0) {
                links.push_back({idx(r, c), idx(r, c + 1), 'b'});
            } else {
                links.push_back({idx(r, c + 1), idx(r, c), 'g'});
            }
        }
    }
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if ((r + c) % 2 == 0) links.push_back({idx(r, c), idx(r + 1, c), 'r'});
        }
    }
    return HoneycombLattice(std::move(sub), std::move(links));
}

/// Two sites joined by a single bond of the given color.
[[nodiscard]] inline HoneycombLattice single_link(char color = 'r') {
    return HoneycombLattice({Sublattice::A, Sublattice::B}, {{0, 1, color}});
}

[[nodiscard]] inline nlohmann::json to_json(const HoneycombLattice &lat) {
    nlohmann::json j;
    j["num_sites"] = lat.num_sites();
    auto &sub = j["sublattice"] = nlohmann::json::array();
    for (auto s : lat.sublattice()) sub.push_back(std::string(1, static_cast<char>(s)));
    auto &links = j["links"] = nlohmann::json::array();
    for (const auto &l : lat.links()) links.push_back({l.a, l.b, std::string(1, l.color)});
    return j;
}

[[nodiscard]] inline HoneycombLattice lattice_from_json(const nlohmann::json &j) {
    try {
        for (const auto &[key, _] : j.items()) {
            if (key != "num_sites" && key != "sublattice" && key != "links") {
                throw InvalidArgument("unknown lattice field '" + key + "'");
            }
        }
        const auto n = j.at("num_sites").get<std::size_t>();
        const auto &sj = j.at("sublattice");
        if (sj.size() != n) throw InvalidArgument("sublattice length differs from num_sites");
        std::vector<Sublattice> sub;
        sub.reserve(n);
        for (const auto &s : sj) {
            const auto v = s.get<std::string>();
            if (v == "A") sub.push_back(Sublattice::A);
            else if (v == "B") sub.push_back(Sublattice::B);
            else throw InvalidArgument("sublattice label must be \"A\" or \"B\", got \"" + v + "\"");
        }
        std::vector<Link> links;
        for (const auto &l : j.at("links")) {
            if (!l.is_array() || l.size() != 3) throw InvalidArgument("link must be [a, b, color]");
            const auto color = l[2].get<std::string>();
            if (color.size() != 1) throw InvalidArgument("link color must be one of r, b, g");
            links.push_back({l[0].get<std::size_t>(), l[1].get<std::size_t>(), color[0]});
        }
        return HoneycombLattice(std::move(sub), std::move(links));
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("malformed lattice JSON: ") + e.what());
    }
}

[[nodiscard]] inline HoneycombLattice load_lattice(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open lattice file " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument("cannot parse " + path + ": " + e.what());
    }
    return lattice_from_json(j);
}

inline void save_lattice(const HoneycombLattice &lat, const std::string &path) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot write " + path);
    os << to_json(lat).dump() << '\n';
}

} // namespace bellvqc::bell
