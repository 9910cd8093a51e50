// Guide chapters, compiled so their listings run as doc tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/world.md")]
pub mod world {}
#[doc = include_str!("../../../book/src/value_functions.md")]
pub mod value_functions {}
#[doc = include_str!("../../../book/src/local_regression.md")]
pub mod local_regression {}
#[doc = include_str!("../../../book/src/planner.md")]
pub mod planner {}
#[doc = include_str!("../../../book/src/learning_navigation.md")]
pub mod learning_navigation {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
