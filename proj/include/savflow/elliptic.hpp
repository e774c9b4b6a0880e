#pragma once

namespace savflow {

/// Complete elliptic integral of the first kind K(k) for modulus 0 <= k < 1,
/// computed with the arithmetic–geometric mean.
double elliptic_K(double k);

struct JacobiValues {
    double sn;
    double cn;
    double dn;
};

/// sn, cn, dn of (x | k) by the descending Landen (AGM) amplitude recursion.
JacobiValues jacobi_elliptic(double x, double k);

double jacobi_cn(double x, double k);

}  // namespace savflow
