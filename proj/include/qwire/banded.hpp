#ifndef QWIRE_BANDED_HPP
#define QWIRE_BANDED_HPP

#include <stdexcept>
#include <vector>

#include "qwire/precision.hpp"

namespace qwire {

// General banded matrix with LU factorization and partial pivoting.
// Storage follows the LAPACK *gbtrf convention: column j holds band rows
// kl+ku+i-j for max(0,j-ku-kl) <= ... the extra kl rows absorb pivoting
// fill-in. C is the complex value type.
template <class C>
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(size_t(ld_) * n), piv_(n) {}

    int size() const { return n_; }

    // A(i,j) += v, |i-j| within the band
    void add(int i, int j, const C& v) {
        if (i - j > kl_ || j - i > ku_) throw std::out_of_range("banded: entry outside band");
        at(i, j) += v;
    }
    void set(int i, int j, const C& v) {
        if (i - j > kl_ || j - i > ku_) throw std::out_of_range("banded: entry outside band");
        at(i, j) = v;
    }
    C get(int i, int j) const {
        if (i - j > kl_ || j - i > ku_) return C{};
        return ab_[size_t(j) * ld_ + (kl_ + ku_ + i - j)];
    }

    // in-place LU with row partial pivoting
    void factor() {
        for (int j = 0; j < n_; ++j) {
            const int iend = std::min(n_ - 1, j + kl_);
            int ip = j;
            auto pmax = band_mag(at(j, j));
            for (int i = j + 1; i <= iend; ++i) {
                const auto m = band_mag(at(i, j));
                if (m > pmax) {
                    pmax = m;
                    ip = i;
                }
            }
            if (!(pmax > decltype(pmax)(0))) throw std::runtime_error("banded: singular matrix");
            piv_[j] = ip;
            const int jend = std::min(n_ - 1, j + ku_ + kl_);
            if (ip != j)
                for (int c = j; c <= jend; ++c) std::swap(at(j, c), at(ip, c));
            const C pivot = at(j, j);
            for (int i = j + 1; i <= iend; ++i) {
                const C l = at(i, j) / pivot;
                at(i, j) = l;
                for (int c = j + 1; c <= jend; ++c) at(i, c) -= l * at(j, c);
            }
        }
        factored_ = true;
    }

    // solve A x = b using the stored factorization; b is overwritten
    void solve(std::vector<C>& b) const {
        if (!factored_) throw std::logic_error("banded: factor() first");
        for (int j = 0; j < n_ - 1; ++j) {
            if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            const int iend = std::min(n_ - 1, j + kl_);
            for (int i = j + 1; i <= iend; ++i) b[i] -= cat(i, j) * b[j];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            const int istart = std::max(0, j - ku_ - kl_);
            b[j] = b[j] / cat(j, j);
            for (int i = istart; i < j; ++i) b[i] -= cat(i, j) * b[j];
        }
    }

  private:
    C& at(int i, int j) { return ab_[size_t(j) * ld_ + (kl_ + ku_ + i - j)]; }
    const C& cat(int i, int j) const { return ab_[size_t(j) * ld_ + (kl_ + ku_ + i - j)]; }

    int n_, kl_, ku_, ld_;
    std::vector<C> ab_;
    std::vector<int> piv_;
    bool factored_ = false;
};

}  // namespace qwire

#endif
