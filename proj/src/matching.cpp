#include "fluxsim/matching.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace fluxsim {

namespace {

// Primal-dual blossom matching, following Galil's formulation (the layout of
// the widely used mwmatching reference implementation). Vertices 0..n-1;
// blossoms n..2n-1. Edge endpoints are indexed as p = 2k or 2k+1.
class Matcher {
  public:
    Matcher(int n, const std::vector<std::tuple<int, int, double>>& edge_list, bool maxcard)
        : n_(n), edges_(edge_list), maxcard_(maxcard) {
        const int m = int(edges_.size());
        maxweight_ = 0.0;
        for (auto& [i, j, w] : edges_) {
            if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j)
                throw std::invalid_argument("max_weight_matching: bad edge");
            maxweight_ = std::max(maxweight_, w);
        }
        endpoint_.resize(2 * m);
        neighbend_.assign(n_, {});
        for (int k = 0; k < m; ++k) {
            endpoint_[2 * k] = std::get<0>(edges_[k]);
            endpoint_[2 * k + 1] = std::get<1>(edges_[k]);
            neighbend_[std::get<0>(edges_[k])].push_back(2 * k + 1);
            neighbend_[std::get<1>(edges_[k])].push_back(2 * k);
        }
        mate_.assign(n_, -1);
        label_.assign(2 * n_, 0);
        labelend_.assign(2 * n_, -1);
        inblossom_.resize(n_);
        for (int v = 0; v < n_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * n_, -1);
        blossomchilds_.assign(2 * n_, {});
        blossombase_.resize(2 * n_);
        for (int v = 0; v < n_; ++v) blossombase_[v] = v;
        for (int b = n_; b < 2 * n_; ++b) blossombase_[b] = -1;
        blossomendps_.assign(2 * n_, {});
        bestedge_.assign(2 * n_, -1);
        blossombestedges_.assign(2 * n_, {});
        for (int b = 2 * n_ - 1; b >= n_; --b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * n_, 0.0);
        for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight_;
        allowedge_.assign(m, false);
    }

    std::vector<int> run() {
        for (int t = 0; t < n_; ++t) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = n_; b < 2 * n_; ++b) blossombestedges_[b].clear();
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < n_; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    assert(label_[inblossom_[v]] == 1);
                    for (int p : neighbend_[v]) {
                        int k = p / 2;
                        int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        double kslack = 0.0;
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            if (kslack <= 1e-12 * std::max(1.0, maxweight_)) allowedge_[k] = true;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                int base = scan_blossom(v, w);
                                if (base >= 0) add_blossom(base, k);
                                else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            int b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                        }
                    }
                    if (augmented) break;
                }
                if (augmented) break;

                // dual update
                int deltatype = -1;
                double delta = 0.0;
                int deltaedge = -1, deltablossom = -1;
                if (!maxcard_) {
                    deltatype = 1;
                    delta = std::max(0.0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
                }
                for (int v = 0; v < n_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        double d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * n_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        double d = 0.5 * slack(bestedge_[b]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = n_; b < 2 * n_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (deltatype == -1 || dualvar_[b] < delta)) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    deltatype = 1;
                    delta = std::max(0.0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
                }

                for (int v = 0; v < n_; ++v) {
                    int lb = label_[inblossom_[v]];
                    if (lb == 1) dualvar_[v] -= delta;
                    else if (lb == 2) dualvar_[v] += delta;
                }
                for (int b = n_; b < 2 * n_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1) dualvar_[b] += delta;
                        else if (label_[b] == 2) dualvar_[b] -= delta;
                    }
                }

                if (deltatype == 1) break;  // optimum reached
                if (deltatype == 2) {
                    allowedge_[deltaedge] = true;
                    int i = std::get<0>(edges_[deltaedge]);
                    if (label_[inblossom_[i]] == 0) i = std::get<1>(edges_[deltaedge]);
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = true;
                    queue_.push_back(std::get<0>(edges_[deltaedge]));
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;

            for (int b = n_; b < 2 * n_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 1 &&
                    dualvar_[b] == 0.0)
                    expand_blossom(b, true);
            }
        }

        std::vector<int> result(n_, -1);
        for (int v = 0; v < n_; ++v)
            if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
        return result;
    }

  private:
    double slack(int k) const {
        return dualvar_[std::get<0>(edges_[k])] + dualvar_[std::get<1>(edges_[k])] -
               2.0 * std::get<2>(edges_[k]);
    }

    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < n_) {
            out.push_back(b);
        } else {
            for (int t : blossomchilds_[b]) blossom_leaves(t, out);
        }
    }

    void assign_label(int w, int t, int p) {
        int b = inblossom_[w];
        assert(label_[w] == 0 && label_[b] == 0);
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            std::vector<int> leaves;
            blossom_leaves(b, leaves);
            queue_.insert(queue_.end(), leaves.begin(), leaves.end());
        } else {
            int base = blossombase_[b];
            assert(mate_[base] >= 0);
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            assert(label_[b] == 1);
            path.push_back(b);
            label_[b] = 5;
            assert(labelend_[b] == mate_[blossombase_[b]]);
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                assert(label_[b] == 2);
                assert(labelend_[b] >= 0);
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = std::get<0>(edges_[k]);
        int w = std::get<1>(edges_[k]);
        int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;

        std::vector<int> path;
        std::vector<int> endps;
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            assert(label_[bv] == 2 || (label_[bv] == 1 && labelend_[bv] == mate_[blossombase_[bv]]));
            assert(labelend_[bv] >= 0);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            assert(label_[bw] == 2 || (label_[bw] == 1 && labelend_[bw] == mate_[blossombase_[bw]]));
            assert(labelend_[bw] >= 0);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }

        assert(label_[bb] == 1);
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0.0;
        std::vector<int> leaves;
        blossom_leaves(b, leaves);
        for (int leaf : leaves) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }

        // best-edge lists for the new blossom
        std::vector<int> bestedgeto(2 * n_, -1);
        for (int child : path) {
            std::vector<int> nblists;
            if (blossombestedges_[child].empty()) {
                std::vector<int> cleaves;
                blossom_leaves(child, cleaves);
                for (int leaf : cleaves)
                    for (int p : neighbend_[leaf]) nblists.push_back(p / 2);
            } else {
                nblists = blossombestedges_[child];
            }
            for (int kk : nblists) {
                int i = std::get<0>(edges_[kk]);
                int j = std::get<1>(edges_[kk]);
                if (inblossom_[j] == b) std::swap(i, j);
                int bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 &&
                    (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
                    bestedgeto[bj] = kk;
            }
            blossombestedges_[child].clear();
            bestedge_[child] = -1;
        }
        blossombestedges_[b].clear();
        for (int kk : bestedgeto)
            if (kk != -1) blossombestedges_[b].push_back(kk);
        bestedge_[b] = -1;
        for (int kk : blossombestedges_[b])
            if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;

        blossomchilds_[b] = path;
        blossomendps_[b] = endps;
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < n_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0.0) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> leaves;
                blossom_leaves(s, leaves);
                for (int v : leaves) inblossom_[v] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            assert(labelend_[b] >= 0);
            int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int nchild = int(blossomchilds_[b].size());
            int j = 0;
            for (; j < nchild; ++j)
                if (blossomchilds_[b][j] == entrychild) break;
            int jstep, endptrick;
            if (j & 1) {
                j -= nchild;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            auto child_at = [&](int idx) {
                return blossomchilds_[b][((idx % nchild) + nchild) % nchild];
            };
            auto endp_at = [&](int idx) {
                return blossomendps_[b][((idx % nchild) + nchild) % nchild];
            };
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endp_at(j - endptrick) / 2] = true;
                j += jstep;
                p = endp_at(j - endptrick) ^ endptrick;
                allowedge_[p / 2] = true;
                j += jstep;
            }
            int bv = child_at(j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (child_at(j) != entrychild) {
                bv = child_at(j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                std::vector<int> leaves;
                blossom_leaves(bv, leaves);
                int v = -1;
                for (int leaf : leaves)
                    if (label_[leaf] != 0) {
                        v = leaf;
                        break;
                    }
                if (v >= 0) {
                    assert(label_[v] == 2);
                    assert(inblossom_[v] == bv);
                    label_[v] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(v, 2, labelend_[v]);
                }
                j += jstep;
            }
        }
        label_[b] = -1;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= n_) augment_blossom(t, v);
        int nchild = int(blossomchilds_[b].size());
        int i = 0;
        for (; i < nchild; ++i)
            if (blossomchilds_[b][i] == t) break;
        int j = i, jstep, endptrick;
        if (i & 1) {
            j -= nchild;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        auto child_at = [&](int idx) {
            return blossomchilds_[b][((idx % nchild) + nchild) % nchild];
        };
        auto endp_at = [&](int idx) {
            return blossomendps_[b][((idx % nchild) + nchild) % nchild];
        };
        while (j != 0) {
            j += jstep;
            t = child_at(j);
            int p = endp_at(j - endptrick) ^ endptrick;
            if (t >= n_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = child_at(j);
            if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i,
                    blossomchilds_[b].end());
        std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i,
                    blossomendps_[b].end());
        blossombase_[b] = blossombase_[blossomchilds_[b][0]];
        assert(blossombase_[b] == blossombase_[blossomchilds_[b][0]]);
    }

    void augment_matching(int k) {
        int v = std::get<0>(edges_[k]);
        int w = std::get<1>(edges_[k]);
        for (auto [s, p] : {std::pair<int, int>{v, 2 * k + 1}, std::pair<int, int>{w, 2 * k}}) {
            while (true) {
                int bs = inblossom_[s];
                assert(label_[bs] == 1);
                assert(labelend_[bs] == mate_[blossombase_[bs]]);
                if (bs >= n_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                int t = endpoint_[labelend_[bs]];
                int bt = inblossom_[t];
                assert(label_[bt] == 2);
                assert(labelend_[bt] >= 0);
                s = endpoint_[labelend_[bt]];
                int j = endpoint_[labelend_[bt] ^ 1];
                assert(blossombase_[bt] == t);
                if (bt >= n_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int n_;
    std::vector<std::tuple<int, int, double>> edges_;
    bool maxcard_;
    double maxweight_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<bool> allowedge_;
    std::vector<int> queue_;
};

}  // namespace

std::vector<int> max_weight_matching(int n_vertices,
                                     const std::vector<std::tuple<int, int, double>>& edges,
                                     bool max_cardinality) {
    if (n_vertices == 0 || edges.empty()) return std::vector<int>(n_vertices, -1);
    Matcher m(n_vertices, edges, max_cardinality);
    return m.run();
}

std::vector<std::pair<int, int>> min_weight_perfect_matching(const Eigen::MatrixXd& w) {
    const int n = int(w.rows());
    if (n % 2 != 0) throw std::invalid_argument("min_weight_perfect_matching: odd vertex count");
    if (n == 0) return {};
    double wmax = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) wmax = std::max(wmax, w(i, j));
    std::vector<std::tuple<int, int, double>> edges;
    edges.reserve(size_t(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j, wmax + 1.0 - w(i, j));
    auto mate = max_weight_matching(n, edges, true);
    std::vector<std::pair<int, int>> pairs;
    for (int v = 0; v < n; ++v) {
        if (mate[v] == -1) throw std::runtime_error("min_weight_perfect_matching: matching not perfect");
        if (v < mate[v]) pairs.emplace_back(v, mate[v]);
    }
    return pairs;
}

}  // namespace fluxsim
