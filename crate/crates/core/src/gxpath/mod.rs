//! GXPath: path and node expressions over data-graphs.

pub mod ast;
pub mod eval;
pub mod fragment;
pub mod parser;
pub mod relation;
pub mod transform;

pub use ast::{Expr, NodeExpr, PathExpr};
pub use eval::{
    eval_node, eval_path, satisfies_at, satisfies_global, satisfies_pair, satisfies_somewhere,
};
pub use fragment::{fragment_of, mentioned_data_values, Fragment};
pub use parser::{parse_node, parse_path, parse_query};
pub use transform::{
    c_bound, eliminate_star, path_to_bipointed, path_to_global, to_global, to_origin,
};
