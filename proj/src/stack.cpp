#include "chainreb/stack.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace chainreb {

namespace {

void add_block(IntMatrix& dst, const IntMatrix& src, index_t row_off, index_t col_off,
               const Int& scale = Int(1)) {
    for (index_t r = 0; r < src.rows(); ++r)
        for (const auto& [c, v] : src.row(r)) dst.add_at(row_off + r, col_off + c, v * scale);
}

IntMatrix comp_or_zero(const GradedMap& m, index_t j, index_t rows, index_t cols) {
    IntMatrix c = m.component(j);
    if (c.rows() == 0 && c.cols() == 0) return IntMatrix(rows, cols);
    if (c.rows() != rows || c.cols() != cols) throw shape_error("horizontal block shape mismatch");
    return c;
}

} // namespace

index_t StackComplex::base_index(const std::string& id) const {
    for (std::size_t i = 0; i < base.size(); ++i)
        if (base[i].id == id) return static_cast<index_t>(i);
    throw shape_error("unknown base cell id: " + id);
}

TotalLayout total_layout(const StackComplex& s) {
    if (s.base.size() != s.fibers.size()) throw shape_error("one fiber per base cell required");
    index_t top = 0;
    for (std::size_t i = 0; i < s.base.size(); ++i)
        top = std::max(top, s.base[i].dim + s.fibers[i].top_degree());
    TotalLayout lay;
    for (index_t n = 0; n <= top; ++n) {
        std::vector<index_t> offs;
        index_t at = 0;
        for (std::size_t i = 0; i < s.base.size(); ++i) {
            offs.push_back(at);
            at += s.fibers[i].dim(n - s.base[i].dim);
        }
        lay.offsets.push_back(std::move(offs));
        lay.dims.push_back(at);
    }
    return lay;
}

namespace {

// Degree -1 graded map on the total basis holding all horizontal blocks.
GradedMap assemble_horizontal(const StackComplex& s, const TotalLayout& lay) {
    const index_t top = static_cast<index_t>(lay.dims.size()) - 1;
    std::vector<IntMatrix> comps;
    for (index_t n = 0; n <= top; ++n)
        comps.emplace_back(n >= 1 ? lay.dims[static_cast<std::size_t>(n - 1)] : 0,
                           lay.dims[static_cast<std::size_t>(n)]);
    for (const auto& blk : s.horizontal) {
        const BaseCell& src = s.base[static_cast<std::size_t>(blk.src)];
        const BaseCell& tgt = s.base[static_cast<std::size_t>(blk.tgt)];
        if (tgt.dim >= src.dim) throw shape_error("horizontal data must lower base dimension");
        const ChainComplex& fs = s.fibers[static_cast<std::size_t>(blk.src)];
        const ChainComplex& ft = s.fibers[static_cast<std::size_t>(blk.tgt)];
        const index_t shift = src.dim - tgt.dim - 1;
        for (index_t j = 0; j <= fs.top_degree(); ++j) {
            IntMatrix m = comp_or_zero(blk.map, j, ft.dim(j + shift), fs.dim(j));
            const index_t n = j + src.dim;
            if (n < 1 || n > top) continue;
            add_block(comps[static_cast<std::size_t>(n)], m,
                      lay.offsets[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(blk.tgt)],
                      lay.offsets[static_cast<std::size_t>(n)][static_cast<std::size_t>(blk.src)]);
        }
    }
    return GradedMap(-1, std::move(comps));
}

GradedMap assemble_vertical(const StackComplex& s, const TotalLayout& lay) {
    const index_t top = static_cast<index_t>(lay.dims.size()) - 1;
    std::vector<IntMatrix> comps;
    for (index_t n = 0; n <= top; ++n)
        comps.emplace_back(n >= 1 ? lay.dims[static_cast<std::size_t>(n - 1)] : 0,
                           lay.dims[static_cast<std::size_t>(n)]);
    for (std::size_t i = 0; i < s.base.size(); ++i) {
        const index_t de = s.base[i].dim;
        const ChainComplex& f = s.fibers[i];
        for (index_t j = 1; j <= f.top_degree(); ++j) {
            const index_t n = j + de;
            if (n > top) continue;
            add_block(comps[static_cast<std::size_t>(n)], f.boundary(j),
                      lay.offsets[static_cast<std::size_t>(n - 1)][i],
                      lay.offsets[static_cast<std::size_t>(n)][i]);
        }
    }
    return GradedMap(-1, std::move(comps));
}

} // namespace

ChainComplex total_complex(const StackComplex& s) {
    TotalLayout lay = total_layout(s);
    GradedMap vert = assemble_vertical(s, lay);
    GradedMap hor = assemble_horizontal(s, lay);
    const index_t top = static_cast<index_t>(lay.dims.size()) - 1;
    std::vector<IntMatrix> bnd;
    for (index_t n = 1; n <= top; ++n) bnd.push_back(vert.component(n) + hor.component(n));
    for (index_t n = 2; n <= top; ++n) {
        IntMatrix sq = bnd[static_cast<std::size_t>(n - 2)] * bnd[static_cast<std::size_t>(n - 1)];
        if (!sq.is_zero())
            throw shape_error("stack boundary square is nonzero from degree " + std::to_string(n));
    }
    return ChainComplex(lay.dims, std::move(bnd));
}

StackComplex mapping_torus_as_stack(const ChainComplex& c, const GradedMap& theta) {
    if (!theta.is_chain_map(c, c, c.top_degree()))
        throw shape_error("stack monodromy must be a chain self-map");
    StackComplex s;
    s.base.push_back({"v", 0});
    s.base.push_back({"e", 1});
    s.fibers.push_back(c);
    s.fibers.push_back(c);
    std::vector<IntMatrix> comps;
    for (index_t j = 0; j <= c.top_degree(); ++j) {
        IntMatrix m = theta.component(j) - IntMatrix::identity(c.dim(j));
        comps.push_back(j % 2 == 0 ? m : -m);
    }
    s.horizontal.push_back({1, 0, GradedMap(0, std::move(comps))});
    return s;
}

StackRebuildResult rebuild_stack(const StackComplex& s, const std::vector<Rebuilding>& fiber_rebuildings) {
    if (fiber_rebuildings.size() != s.base.size())
        throw shape_error("one fiber rebuilding per base cell required");
    for (std::size_t i = 0; i < s.base.size(); ++i)
        if (!(fiber_rebuildings[i].source == s.fibers[i]))
            throw shape_error("fiber rebuilding does not start at the stack fiber");

    StackComplex out;
    out.base = s.base;
    for (const auto& r : fiber_rebuildings) out.fibers.push_back(r.target);

    TotalLayout lay = total_layout(s);
    TotalLayout lay_new = total_layout(out);
    const index_t top = static_cast<index_t>(lay.dims.size()) - 1;
    index_t base_depth = 0;
    for (const auto& b : s.base) base_depth = std::max(base_depth, b.dim);

    auto block_map = [&](auto pick, const TotalLayout& rows_lay, const TotalLayout& cols_lay,
                         int shift) {
        std::vector<IntMatrix> comps;
        for (index_t n = 0; n <= top; ++n) {
            const index_t m = n + shift;
            index_t rows = (m >= 0 && m < static_cast<index_t>(rows_lay.dims.size()))
                               ? rows_lay.dims[static_cast<std::size_t>(m)]
                               : 0;
            IntMatrix mat(rows, cols_lay.dims[static_cast<std::size_t>(n)]);
            for (std::size_t i = 0; i < s.base.size(); ++i) {
                const index_t de = s.base[i].dim;
                IntMatrix piece = pick(i, n - de);
                if (piece.rows() == 0 && piece.cols() == 0) continue;
                if (m >= 0 && m < static_cast<index_t>(rows_lay.dims.size()))
                    add_block(mat, piece, rows_lay.offsets[static_cast<std::size_t>(m)][i],
                              cols_lay.offsets[static_cast<std::size_t>(n)][i]);
            }
            comps.push_back(std::move(mat));
        }
        return GradedMap(shift, std::move(comps));
    };

    GradedMap k_total = block_map(
        [&](std::size_t i, index_t j) {
            return comp_or_zero(fiber_rebuildings[i].g, j, out.fibers[i].dim(j), s.fibers[i].dim(j));
        },
        lay_new, lay, 0);
    GradedMap l_total = block_map(
        [&](std::size_t i, index_t j) {
            return comp_or_zero(fiber_rebuildings[i].h, j, s.fibers[i].dim(j), out.fibers[i].dim(j));
        },
        lay, lay_new, 0);
    GradedMap sigma_total = block_map(
        [&](std::size_t i, index_t j) {
            return comp_or_zero(fiber_rebuildings[i].rho, j, s.fibers[i].dim(j + 1), s.fibers[i].dim(j));
        },
        lay, lay, 1);
    GradedMap hor_total = assemble_horizontal(s, lay);

    // graded maps on total complexes with their row/column layouts attached,
    // so missing components materialize with the right shapes
    struct TMap {
        GradedMap m;
        const TotalLayout* rows;
        const TotalLayout* cols;
    };
    auto dims_of = [](const TotalLayout* l, index_t n) -> index_t {
        if (n < 0 || n >= static_cast<index_t>(l->dims.size())) return 0;
        return l->dims[static_cast<std::size_t>(n)];
    };
    auto comp = [&](const TMap& t, index_t n) {
        IntMatrix c = t.m.component(n);
        const index_t rows = dims_of(t.rows, n + t.m.degree_shift());
        const index_t cols = dims_of(t.cols, n);
        if (c.rows() == 0 && c.cols() == 0) return IntMatrix(rows, cols);
        if (c.rows() != rows || c.cols() != cols) throw shape_error("total map shape drift");
        return c;
    };
    auto compose0 = [&](const TMap& a, const TMap& b) { // a after b
        std::vector<IntMatrix> comps;
        for (index_t n = 0; n <= top; ++n)
            comps.push_back(comp(a, n + b.m.degree_shift()) * comp(b, n));
        return TMap{GradedMap(a.m.degree_shift() + b.m.degree_shift(), std::move(comps)), a.rows,
                    b.cols};
    };
    auto add_maps = [&](const TMap& a, const TMap& b) {
        std::vector<IntMatrix> comps;
        for (index_t n = 0; n <= top; ++n) comps.push_back(comp(a, n) + comp(b, n));
        return TMap{GradedMap(a.m.degree_shift(), std::move(comps)), a.rows, a.cols};
    };
    auto identity_total = [&]() {
        std::vector<IntMatrix> comps;
        for (index_t n = 0; n <= top; ++n)
            comps.push_back(IntMatrix::identity(lay.dims[static_cast<std::size_t>(n)]));
        return TMap{GradedMap(0, std::move(comps)), &lay, &lay};
    };

    TMap k_t{std::move(k_total), &lay_new, &lay};
    TMap l_t{std::move(l_total), &lay, &lay_new};
    TMap sigma_t{std::move(sigma_total), &lay, &lay};
    TMap hor_t{std::move(hor_total), &lay, &lay};

    // transfer series truncated at the base filtration depth
    TMap hs = compose0(hor_t, sigma_t); // degree 0
    TMap sh = compose0(sigma_t, hor_t);
    TMap series_hs = identity_total();
    TMap series_sh = identity_total();
    TMap power_hs = identity_total();
    TMap power_sh = identity_total();
    for (index_t i = 1; i <= base_depth; ++i) {
        power_hs = compose0(hs, power_hs);
        power_sh = compose0(sh, power_sh);
        series_hs = add_maps(series_hs, power_hs);
        series_sh = add_maps(series_sh, power_sh);
    }

    GradedMap g_total = compose0(k_t, series_hs).m;
    GradedMap h_total2 = compose0(series_sh, l_t).m;
    GradedMap rho_total = compose0(sigma_t, series_hs).m;
    GradedMap hor_new_total = compose0(k_t, compose0(series_hs, compose0(hor_t, l_t))).m;

    // split the new horizontal map back into strictly-lowering blocks
    for (std::size_t src = 0; src < out.base.size(); ++src) {
        for (std::size_t tgt = 0; tgt < out.base.size(); ++tgt) {
            if (out.base[tgt].dim >= out.base[src].dim) continue;
            const index_t shift = out.base[src].dim - out.base[tgt].dim - 1;
            std::vector<IntMatrix> comps;
            bool nonzero = false;
            for (index_t j = 0; j <= out.fibers[src].top_degree(); ++j) {
                IntMatrix blk(out.fibers[tgt].dim(j + shift), out.fibers[src].dim(j));
                const index_t n = j + out.base[src].dim;
                if (n >= 1 && n <= top) {
                    const IntMatrix& whole = hor_new_total.component(n);
                    const index_t ro = lay_new.offsets[static_cast<std::size_t>(n - 1)][tgt];
                    const index_t co = lay_new.offsets[static_cast<std::size_t>(n)][src];
                    for (index_t r = 0; r < blk.rows(); ++r)
                        for (const auto& [c, v] : whole.row(ro + r))
                            if (c >= co && c < co + blk.cols()) blk.set(r, c - co, v);
                }
                if (!blk.is_zero()) nonzero = true;
                comps.push_back(std::move(blk));
            }
            if (nonzero)
                out.horizontal.push_back({static_cast<index_t>(src), static_cast<index_t>(tgt),
                                          GradedMap(static_cast<int>(shift), std::move(comps))});
        }
    }
    // anything outside those blocks would violate the filtration; reassembling
    // and comparing catches it exactly
    {
        GradedMap reassembled = assemble_horizontal(out, lay_new);
        for (index_t n = 0; n <= top; ++n)
            if (!(reassembled.component(n) == hor_new_total.component(n)))
                throw shape_error("rebuilt horizontal data escaped the base filtration");
    }

    StackRebuildResult result;
    result.stack = std::move(out);
    result.rebuilding.alpha = top;
    result.rebuilding.source = total_complex(s);
    result.rebuilding.target = total_complex(result.stack);
    std::vector<IntMatrix> g, h, rho;
    for (index_t n = 0; n <= top; ++n) {
        g.push_back(g_total.component(n));
        h.push_back(h_total2.component(n));
        rho.push_back(rho_total.component(n));
    }
    result.rebuilding.g = GradedMap(0, std::move(g));
    result.rebuilding.h = GradedMap(0, std::move(h));
    result.rebuilding.rho = GradedMap(1, std::move(rho));
    return result;
}

void write_stack(const std::string& dir, const std::string& name, const StackComplex& s) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream main(fs::path(dir) / (name + ".stack"));
    main << "# stack\ncells " << s.base.size() << '\n';
    for (std::size_t i = 0; i < s.base.size(); ++i) {
        std::string fiber_file = name + "." + s.base[i].id + ".chain";
        main << "cell " << s.base[i].id << ' ' << s.base[i].dim << ' ' << fiber_file << '\n';
        std::ofstream fos(fs::path(dir) / fiber_file);
        s.fibers[i].write(fos);
    }
    for (const auto& blk : s.horizontal) {
        for (index_t j = 0; j <= blk.map.max_degree(); ++j) {
            IntMatrix m = blk.map.component(j);
            if (m.rows() == 0 && m.cols() == 0) continue;
            main << "horizontal " << s.base[static_cast<std::size_t>(blk.src)].id << ' '
                 << s.base[static_cast<std::size_t>(blk.tgt)].id << ' ' << j << '\n';
            m.write_triplets(main);
        }
    }
}

StackComplex read_stack(const std::string& path) {
    namespace fs = std::filesystem;
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open stack file " + path);
    fs::path dir = fs::path(path).parent_path();
    StackComplex s;
    std::string word;
    std::map<std::pair<index_t, index_t>, std::vector<std::pair<index_t, IntMatrix>>> blocks;
    while (is >> word) {
        if (word[0] == '#') {
            std::string rest;
            std::getline(is, rest);
            continue;
        }
        if (word == "cells") {
            index_t n;
            is >> n;
        } else if (word == "cell") {
            BaseCell cell;
            std::string fiber_file;
            is >> cell.id >> cell.dim >> fiber_file;
            std::ifstream fis(dir / fiber_file);
            if (!fis) throw parse_error("cannot open fiber file " + fiber_file);
            s.fibers.push_back(ChainComplex::read(fis));
            s.base.push_back(std::move(cell));
        } else if (word == "horizontal") {
            std::string src_id, tgt_id;
            index_t j;
            is >> src_id >> tgt_id >> j;
            blocks[{s.base_index(src_id), s.base_index(tgt_id)}].emplace_back(j,
                                                                              IntMatrix::read_triplets(is));
        } else {
            throw parse_error("unknown stack directive " + word);
        }
    }
    for (auto& [key, pieces] : blocks) {
        const auto [src, tgt] = key;
        const int shift = static_cast<int>(s.base[static_cast<std::size_t>(src)].dim -
                                           s.base[static_cast<std::size_t>(tgt)].dim - 1);
        GradedMap m(shift, {});
        for (auto& [j, mat] : pieces) m.set_component(j, std::move(mat));
        s.horizontal.push_back({src, tgt, std::move(m)});
    }
    return s;
}

} // namespace chainreb
