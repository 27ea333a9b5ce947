pub mod bubble_check;
pub mod deficit;
pub mod flow;
pub mod project;
pub mod rate_fit;
pub mod report;
pub mod spectrum;
pub mod transform;
