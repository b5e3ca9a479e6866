// Generates the compiled codelet kernels from the codelet generator.

use std::fmt::Write;
use std::path::PathBuf;

use tunefft_codelet::unparse::rust_function;
use tunefft_codelet::{generate_best, CodeletKind};

const SIZES: [usize; 11] = [2, 3, 4, 5, 7, 8, 11, 13, 16, 32, 64];

fn main() {
    println!("cargo:rerun-if-changed=build.rs");
    let mut src = String::new();
    let mut tables = [String::new(), String::new(), String::new()];
    for n in SIZES {
        for (t, (kind, prefix)) in [
            (CodeletKind::Notw, "n"),
            (CodeletKind::Twiddle, "t"),
            (CodeletKind::TwiddleDif, "q"),
        ]
        .into_iter()
        .enumerate()
        {
            let c = generate_best(n, kind, -1).expect("every codelet size is generable");
            let name = format!("{prefix}_{n}");
            src.push_str(&rust_function(&c.dag, &name));
            let ops = c.ops();
            writeln!(
                tables[t],
                "    Kernel {{ n: {n}, algorithm: \"{}\", adds: {}, mults: {}, f: {name} }},",
                c.spec.algorithm, ops.adds, ops.mults
            )
            .unwrap();
        }
    }
    for (name, ty, body) in [
        ("NOTW", "NotwFn", &tables[0]),
        ("TWIDDLE", "TwFn", &tables[1]),
        ("TWIDDLE_DIF", "TwFn", &tables[2]),
    ] {
        writeln!(src, "pub static {name}: &[Kernel<{ty}>] = &[\n{body}];").unwrap();
    }
    let out = PathBuf::from(std::env::var("OUT_DIR").unwrap()).join("kernels.rs");
    std::fs::write(out, src).unwrap();
}
