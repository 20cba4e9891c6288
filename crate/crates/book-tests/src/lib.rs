//! Compiles the guide's Rust snippets as doctests so the book cannot drift
//! from the library.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        #[cfg(doctest)]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(networks, "networks.md");
chapter!(scales, "scales.md");
chapter!(ann, "ann.md");
chapter!(aco, "aco.md");
chapter!(pso, "pso.md");
chapter!(eca, "eca.md");
chapter!(meta, "meta.md");
chapter!(analysis, "analysis.md");
chapter!(cli, "cli.md");
chapter!(reproducibility, "reproducibility.md");
