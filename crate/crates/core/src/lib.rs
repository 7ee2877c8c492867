pub mod corpus;
pub mod error;
pub mod inventory;
pub mod lip;
pub mod optimize;
pub mod phonology;
pub mod pinyin;
pub mod synth;
pub mod transcode;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/pinyin.md")]
    mod pinyin {}
    #[doc = include_str!("../../../book/src/inventory.md")]
    mod inventory {}
    #[doc = include_str!("../../../book/src/transcoding.md")]
    mod transcoding {}
    #[doc = include_str!("../../../book/src/classifier.md")]
    mod classifier {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
