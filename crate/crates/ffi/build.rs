use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    let mut config = cbindgen::Config::default();
    config.enumeration.prefix_with_name = true;
    config.enumeration.rename_variants = cbindgen::RenameRule::ScreamingSnakeCase;
    cbindgen::Builder::new()
        .with_config(config)
        .with_crate(&crate_dir)
        .with_language(cbindgen::Language::C)
        .with_include_guard("TMHCRF_H")
        .with_cpp_compat(true)
        .with_documentation(true)
        .with_parse_deps(false)
        .with_header("/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */")
        .with_style(cbindgen::Style::Both)
        .generate()
        .expect("unable to generate C bindings")
        .write_to_file(crate_dir.join("include/tmhcrf.h"));
}
