fn main() {
    // Banded Cholesky and LU factorisations come from the system LAPACK (OpenBLAS build).
    let lib = std::env::var("OSCILLAT_LAPACK_LIB").unwrap_or_else(|_| "openblas".to_string());
    println!("cargo:rustc-link-lib={lib}");
    println!("cargo:rerun-if-env-changed=OSCILLAT_LAPACK_LIB");
}
