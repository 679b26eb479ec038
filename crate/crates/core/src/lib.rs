pub mod cli;
pub mod clifford;
pub mod error;
pub mod exactmat;
pub mod gmanifold;
pub mod hurwitz;
pub mod json;
pub mod liepairs;
pub mod pencil;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/rho.md")]
    mod rho {}
    #[doc = include_str!("../../../book/src/clifford.md")]
    mod clifford {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/pencils.md")]
    mod pencils {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
