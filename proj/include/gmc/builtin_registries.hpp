#pragma once

#include "gmc/registry.hpp"

namespace gmc {

/// The default kernel set: BLAS/LAPACK-flavored product and solve kernels
/// with FLOP-count cost polynomials (m, n: output dimensions; k: contracted
/// dimension). Specialized kernels come before general ones so that exact
/// cost ties resolve toward the more specific routine. Costs keep only the
/// leading-order terms of the standard operation counts. No kernel computes
/// a product of two inverted factors; chains needing one are computable only
/// through a different parenthesization.
inline const char* default_registry_text() {
  return R"rrr(# diagonal scaling
kernel DIAGMM_L  pattern=X*Y     constraints=Diagonal@X cost=m*n exec=diagmm template="diagmm!('L', 'N', {A}, {B}, {OUT})" flags=side:L,trans:N
kernel DIAGMM_R  pattern=X*Y     constraints=Diagonal@Y cost=m*n exec=diagmm template="diagmm!('R', 'N', {B}, {A}, {OUT})" flags=side:R,trans:N
kernel DIAGMM_LT pattern=X^T*Y   constraints=Diagonal@X cost=m*n exec=diagmm template="diagmm!('L', 'T', {A}, {B}, {OUT})" flags=side:L,trans:T
kernel DIAGMM_RT pattern=X*Y^T   constraints=Diagonal@Y cost=m*n exec=diagmm template="diagmm!('R', 'T', {B}, {A}, {OUT})" flags=side:R,trans:T
# vector-vector
kernel DOT    pattern=X^T*Y constraints=ColVector@X,ColVector@Y cost=2*k   exec=gemm template="dot!({A}, {B}, {OUT})"
kernel DOT_NN pattern=X*Y   constraints=RowVector@X,ColVector@Y cost=2*k   exec=gemm template="dot!({A}, {B}, {OUT})"
kernel GER    pattern=X*Y^T constraints=ColVector@X,ColVector@Y cost=2*m*n exec=gemm template="ger!(1.0, {A}, {B}, {OUT})"
kernel GER_NN pattern=X*Y   constraints=ColVector@X,RowVector@Y cost=2*m*n exec=gemm template="ger!(1.0, {A}, {B}, {OUT})"
# matrix-vector
kernel GEMV_N  pattern=X*Y     constraints=ColVector@Y cost=2*m*k exec=gemm template="gemv!('N', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:N
kernel GEMV_T  pattern=X^T*Y   constraints=ColVector@Y cost=2*m*k exec=gemm template="gemv!('T', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:T
kernel GEMV_NT pattern=X*Y^T   constraints=RowVector@Y cost=2*m*k exec=gemm template="gemv!('N', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:N
kernel GEMV_TT pattern=X^T*Y^T constraints=RowVector@Y cost=2*m*k exec=gemm template="gemv!('T', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:T
kernel GEVM_N  pattern=X*Y     constraints=RowVector@X cost=2*k*n exec=gemm template="gevm!('N', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:N
kernel GEVM_TN pattern=X^T*Y   constraints=ColVector@X cost=2*k*n exec=gemm template="gevm!('T', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:T
kernel GEVM_NT pattern=X*Y^T   constraints=RowVector@X cost=2*k*n exec=gemm template="gevm!('N', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:N
kernel GEVM_TT pattern=X^T*Y^T constraints=ColVector@X cost=2*k*n exec=gemm template="gevm!('T', 1.0, {A}, {B}, 0.0, {OUT})" flags=trans:T
# triangular matrix-vector
kernel TRMV_LN pattern=X*Y   constraints=LowerTriangular@X,ColVector@Y cost=m^2 exec=trmm template="trmv!('L', 'N', 'N', {A}, {B})" out=B flags=uplo:L,trans:N
kernel TRMV_UN pattern=X*Y   constraints=UpperTriangular@X,ColVector@Y cost=m^2 exec=trmm template="trmv!('U', 'N', 'N', {A}, {B})" out=B flags=uplo:U,trans:N
kernel TRMV_LT pattern=X^T*Y constraints=LowerTriangular@X,ColVector@Y cost=m^2 exec=trmm template="trmv!('L', 'T', 'N', {A}, {B})" out=B flags=uplo:L,trans:T
kernel TRMV_UT pattern=X^T*Y constraints=UpperTriangular@X,ColVector@Y cost=m^2 exec=trmm template="trmv!('U', 'T', 'N', {A}, {B})" out=B flags=uplo:U,trans:T
kernel TRMV_RLN pattern=X*Y   constraints=RowVector@X,LowerTriangular@Y cost=n^2 exec=trmm template="trvm!('L', 'N', 'N', {B}, {A})" out=A flags=uplo:L,trans:N
kernel TRMV_RUN pattern=X*Y   constraints=RowVector@X,UpperTriangular@Y cost=n^2 exec=trmm template="trvm!('U', 'N', 'N', {B}, {A})" out=A flags=uplo:U,trans:N
kernel TRMV_RLT pattern=X*Y^T constraints=RowVector@X,LowerTriangular@Y cost=n^2 exec=trmm template="trvm!('L', 'T', 'N', {B}, {A})" out=A flags=uplo:L,trans:T
kernel TRMV_RUT pattern=X*Y^T constraints=RowVector@X,UpperTriangular@Y cost=n^2 exec=trmm template="trvm!('U', 'T', 'N', {B}, {A})" out=A flags=uplo:U,trans:T
# symmetric rank-k update (X^T X and X X^T)
kernel SYRK   pattern=X^T*X cost=m^2*k exec=syrk template="syrk!('L', 'T', 1.0, {A}, 0.0, {OUT})" flags=uplo:L,trans:T
kernel SYRK_N pattern=X*X^T cost=m^2*k exec=syrk template="syrk!('L', 'N', 1.0, {A}, 0.0, {OUT})" flags=uplo:L,trans:N
# triangular matrix-matrix
kernel TRMM_LLN pattern=X*Y   constraints=LowerTriangular@X cost=m^2*n exec=trmm template="trmm!('L', 'L', 'N', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:L,trans:N
kernel TRMM_LUN pattern=X*Y   constraints=UpperTriangular@X cost=m^2*n exec=trmm template="trmm!('L', 'U', 'N', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:U,trans:N
kernel TRMM_LLT pattern=X^T*Y constraints=LowerTriangular@X cost=m^2*n exec=trmm template="trmm!('L', 'L', 'T', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:L,trans:T
kernel TRMM_LUT pattern=X^T*Y constraints=UpperTriangular@X cost=m^2*n exec=trmm template="trmm!('L', 'U', 'T', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:U,trans:T
kernel TRMM_RLN pattern=X*Y   constraints=LowerTriangular@Y cost=m*n^2 exec=trmm template="trmm!('R', 'L', 'N', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:L,trans:N
kernel TRMM_RUN pattern=X*Y   constraints=UpperTriangular@Y cost=m*n^2 exec=trmm template="trmm!('R', 'U', 'N', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:U,trans:N
kernel TRMM_RLT pattern=X*Y^T constraints=LowerTriangular@Y cost=m*n^2 exec=trmm template="trmm!('R', 'L', 'T', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:L,trans:T
kernel TRMM_RUT pattern=X*Y^T constraints=UpperTriangular@Y cost=m*n^2 exec=trmm template="trmm!('R', 'U', 'T', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:U,trans:T
# symmetric matrix-matrix
kernel SYMM_L  pattern=X*Y   constraints=Symmetric@X cost=m^2*n exec=symm template="symm!('L', 'L', 1.0, {A}, {B}, 0.0, {OUT})" flags=side:L,uplo:L
kernel SYMM_LT pattern=X^T*Y constraints=Symmetric@X cost=m^2*n exec=symm template="symm!('L', 'L', 1.0, {A}, {B}, 0.0, {OUT})" flags=side:L,uplo:L
kernel SYMM_R  pattern=X*Y   constraints=Symmetric@Y cost=m*n^2 exec=symm template="symm!('R', 'L', 1.0, {B}, {A}, 0.0, {OUT})" flags=side:R,uplo:L
kernel SYMM_RT pattern=X*Y^T constraints=Symmetric@Y cost=m*n^2 exec=symm template="symm!('R', 'L', 1.0, {B}, {A}, 0.0, {OUT})" flags=side:R,uplo:L
# general matrix-matrix
kernel GEMM_NN pattern=X*Y     cost=2*m*n*k exec=gemm template="gemm!('N', 'N', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:N,transb:N
kernel GEMM_TN pattern=X^T*Y   cost=2*m*n*k exec=gemm template="gemm!('T', 'N', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:T,transb:N
kernel GEMM_NT pattern=X*Y^T   cost=2*m*n*k exec=gemm template="gemm!('N', 'T', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:N,transb:T
kernel GEMM_TT pattern=X^T*Y^T cost=2*m*n*k exec=gemm template="gemm!('T', 'T', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:T,transb:T
# diagonal solves
kernel DIAGSV_L  pattern=X^-1*Y constraints=Diagonal@X cost=m*n exec=diagsv template="diagsv!('L', 'N', {A}, {B})" out=B flags=side:L,trans:N
kernel DIAGSV_LT pattern=X^-T*Y constraints=Diagonal@X cost=m*n exec=diagsv template="diagsv!('L', 'T', {A}, {B})" out=B flags=side:L,trans:T
kernel DIAGSV_R  pattern=Y*X^-1 constraints=Diagonal@X cost=m*n exec=diagsv template="diagsv!('R', 'N', {B}, {A})" out=A flags=side:R,trans:N
kernel DIAGSV_RT pattern=Y*X^-T constraints=Diagonal@X cost=m*n exec=diagsv template="diagsv!('R', 'T', {B}, {A})" out=A flags=side:R,trans:T
# triangular solves, vector right-hand side
kernel TRSV_LLN pattern=X^-1*Y constraints=LowerTriangular@X,ColVector@Y cost=m^2 exec=trsm template="trsv!('L', 'N', 'N', {A}, {B})" out=B flags=uplo:L,trans:N
kernel TRSV_LUN pattern=X^-1*Y constraints=UpperTriangular@X,ColVector@Y cost=m^2 exec=trsm template="trsv!('U', 'N', 'N', {A}, {B})" out=B flags=uplo:U,trans:N
kernel TRSV_LLT pattern=X^-T*Y constraints=LowerTriangular@X,ColVector@Y cost=m^2 exec=trsm template="trsv!('L', 'T', 'N', {A}, {B})" out=B flags=uplo:L,trans:T
kernel TRSV_LUT pattern=X^-T*Y constraints=UpperTriangular@X,ColVector@Y cost=m^2 exec=trsm template="trsv!('U', 'T', 'N', {A}, {B})" out=B flags=uplo:U,trans:T
kernel TRSV_RLN pattern=Y*X^-1 constraints=LowerTriangular@X,RowVector@Y cost=n^2 exec=trsm template="trsv!('L', 'N', 'N', {B}, {A})" out=A flags=uplo:L,trans:N
kernel TRSV_RUN pattern=Y*X^-1 constraints=UpperTriangular@X,RowVector@Y cost=n^2 exec=trsm template="trsv!('U', 'N', 'N', {B}, {A})" out=A flags=uplo:U,trans:N
kernel TRSV_RLT pattern=Y*X^-T constraints=LowerTriangular@X,RowVector@Y cost=n^2 exec=trsm template="trsv!('L', 'T', 'N', {B}, {A})" out=A flags=uplo:L,trans:T
kernel TRSV_RUT pattern=Y*X^-T constraints=UpperTriangular@X,RowVector@Y cost=n^2 exec=trsm template="trsv!('U', 'T', 'N', {B}, {A})" out=A flags=uplo:U,trans:T
# triangular solves
kernel TRSM_LLN pattern=X^-1*Y constraints=LowerTriangular@X cost=m^2*n exec=trsm template="trsm!('L', 'L', 'N', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:L,trans:N
kernel TRSM_LUN pattern=X^-1*Y constraints=UpperTriangular@X cost=m^2*n exec=trsm template="trsm!('L', 'U', 'N', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:U,trans:N
kernel TRSM_LLT pattern=X^-T*Y constraints=LowerTriangular@X cost=m^2*n exec=trsm template="trsm!('L', 'L', 'T', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:L,trans:T
kernel TRSM_LUT pattern=X^-T*Y constraints=UpperTriangular@X cost=m^2*n exec=trsm template="trsm!('L', 'U', 'T', 'N', 1.0, {A}, {B})" out=B flags=side:L,uplo:U,trans:T
kernel TRSM_RLN pattern=Y*X^-1 constraints=LowerTriangular@X cost=m*n^2 exec=trsm template="trsm!('R', 'L', 'N', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:L,trans:N
kernel TRSM_RUN pattern=Y*X^-1 constraints=UpperTriangular@X cost=m*n^2 exec=trsm template="trsm!('R', 'U', 'N', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:U,trans:N
kernel TRSM_RLT pattern=Y*X^-T constraints=LowerTriangular@X cost=m*n^2 exec=trsm template="trsm!('R', 'L', 'T', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:L,trans:T
kernel TRSM_RUT pattern=Y*X^-T constraints=UpperTriangular@X cost=m*n^2 exec=trsm template="trsm!('R', 'U', 'T', 'N', 1.0, {B}, {A})" out=A flags=side:R,uplo:U,trans:T
# SPD solves (Cholesky)
kernel POSV    pattern=X^-1*Y constraints=SPD@X cost=(1/3)*m^3+2*m^2*n exec=posv template="posv!('L', {A}, {B})" out=B flags=uplo:L
kernel POSV_T  pattern=X^-T*Y constraints=SPD@X cost=(1/3)*m^3+2*m^2*n exec=posv template="posv!('L', {A}, {B})" out=B flags=uplo:L
kernel POSV_R  pattern=Y*X^-1 constraints=SPD@X cost=(1/3)*n^3+2*m*n^2 exec=posv template="posv!('R', {B}, {A})" out=A flags=uplo:L
kernel POSV_RT pattern=Y*X^-T constraints=SPD@X cost=(1/3)*n^3+2*m*n^2 exec=posv template="posv!('R', {B}, {A})" out=A flags=uplo:L
# symmetric indefinite solves (LDL^T)
kernel SYSV    pattern=X^-1*Y constraints=Symmetric@X cost=(1/3)*m^3+2*m^2*n exec=sysv template="sysv!('L', {A}, {B})" out=B flags=uplo:L
kernel SYSV_T  pattern=X^-T*Y constraints=Symmetric@X cost=(1/3)*m^3+2*m^2*n exec=sysv template="sysv!('L', {A}, {B})" out=B flags=uplo:L
kernel SYSV_R  pattern=Y*X^-1 constraints=Symmetric@X cost=(1/3)*n^3+2*m*n^2 exec=sysv template="sysv!('R', {B}, {A})" out=A flags=uplo:L
kernel SYSV_RT pattern=Y*X^-T constraints=Symmetric@X cost=(1/3)*n^3+2*m*n^2 exec=sysv template="sysv!('R', {B}, {A})" out=A flags=uplo:L
# general solves (LU with partial pivoting)
kernel GESV_N  pattern=X^-1*Y cost=(2/3)*m^3+2*m^2*n exec=gesv template="gesv!('L', 'N', {A}, {B})" out=B flags=trans:N
kernel GESV_T  pattern=X^-T*Y cost=(2/3)*m^3+2*m^2*n exec=gesv template="gesv!('L', 'T', {A}, {B})" out=B flags=trans:T
kernel GESV_RN pattern=Y*X^-1 cost=(2/3)*n^3+2*m*n^2 exec=gesv template="gesv!('R', 'N', {B}, {A})" out=A flags=trans:N
kernel GESV_RT pattern=Y*X^-T cost=(2/3)*n^3+2*m*n^2 exec=gesv template="gesv!('R', 'T', {B}, {A})" out=A flags=trans:T
)rrr";
}

/// Only the four general product kernels: restricting to this set makes the
/// solver coincide with the classic size-based chain algorithm.
inline const char* gemm_only_registry_text() {
  return R"rrr(kernel GEMM_NN pattern=X*Y     cost=2*m*n*k exec=gemm template="gemm!('N', 'N', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:N,transb:N
kernel GEMM_TN pattern=X^T*Y   cost=2*m*n*k exec=gemm template="gemm!('T', 'N', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:T,transb:N
kernel GEMM_NT pattern=X*Y^T   cost=2*m*n*k exec=gemm template="gemm!('N', 'T', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:N,transb:T
kernel GEMM_TT pattern=X^T*Y^T cost=2*m*n*k exec=gemm template="gemm!('T', 'T', 1.0, {A}, {B}, 0.0, {OUT})" flags=transa:T,transb:T
)rrr";
}

/// Experimental additions: explicit inversion (invert, then multiply) and a
/// kernel for products of two inverted factors. Costs model LAPACK-style
/// inversion at 2m^3; the reference executor forms the inverse by solving
/// against the identity, which spends (8/3)m^3 instead.
inline const char* extended_registry_extra_text() {
  return R"rrr(kernel INV_GEMM_L pattern=X^-1*Y cost=2*m^3+2*m^2*n exec=inv_gemm template="getri!({A}); gemm!('N', 'N', 1.0, {A}, {B}, 0.0, {OUT})"
kernel INV_GEMM_R pattern=Y*X^-1 cost=2*n^3+2*m*n^2 exec=inv_gemm template="getri!({B}); gemm!('N', 'N', 1.0, {A}, {B}, 0.0, {OUT})"
kernel INVINV_MM  pattern=X^-1*Y^-1 cost=2*m^3+2*k^3+2*m*n*k exec=invinv template="getri!({A}); getri!({B}); gemm!('N', 'N', 1.0, {A}, {B}, 0.0, {OUT})"
)rrr";
}

inline Registry default_registry() { return load_registry(default_registry_text()); }
inline Registry gemm_only_registry() { return load_registry(gemm_only_registry_text()); }
inline Registry extended_registry() {
  return load_registry(std::string(default_registry_text()) +
                       extended_registry_extra_text());
}

} // namespace gmc
