pub mod arith;
pub mod geometry;
pub mod morse;
pub mod numeric;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod poly;
pub mod puiseux;
pub mod report;
