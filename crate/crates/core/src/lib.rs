pub mod diagnostics;
pub mod io;
pub mod noise;
pub mod roughpath;
pub mod solver;
pub mod spectral;
pub mod stratonovich;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/roughpath.md")]
    mod roughpath {}
    #[doc = include_str!("../../../book/src/stratonovich.md")]
    mod stratonovich {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
