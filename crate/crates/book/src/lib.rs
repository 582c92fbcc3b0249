// Each chapter becomes a module so a failing listing points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/posets.md")]
pub mod posets {}
#[doc = include_str!("../../../book/src/function-spaces.md")]
pub mod function_spaces {}
#[doc = include_str!("../../../book/src/extension-families.md")]
pub mod extension_families {}
#[doc = include_str!("../../../book/src/geometric-decomposition.md")]
pub mod geometric_decomposition {}
#[doc = include_str!("../../../book/src/dual-decomposition.md")]
pub mod dual_decomposition {}
#[doc = include_str!("../../../book/src/simplicial.md")]
pub mod simplicial {}
#[doc = include_str!("../../../book/src/obstructions.md")]
pub mod obstructions {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
