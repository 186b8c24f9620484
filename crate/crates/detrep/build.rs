fn main() {
    // System OpenBLAS carries the LAPACK symbols (zgeev, zgesvd).
    println!("cargo:rustc-link-lib=dylib=openblas");
}
