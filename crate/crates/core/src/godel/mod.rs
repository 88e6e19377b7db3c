//! Gödel numbering of an equational arithmetic over the recursive
//! functions, its proof checker, and proofs extracted from evaluation.

mod code;
mod proof;
mod sig;
mod syntax;

pub use code::{
    code_of_symbols, decode, encode, encode_formula, encode_term, negated_self_code, negation_template, primes, sub,
    symbols_of_code, CodeError, GNum, Syntax,
};
pub use proof::{
    check_proof, check_proof_detailed, decode_proof, encode_proof, eval_with_proof, is_def, CheckError, GodelError,
    IsDef, JsonLine, Line, Proof, Rule,
};
pub use sig::{Node, Signature, Symbol, MAIN};
pub use syntax::{parse_formula, parse_term, var_index, var_name, Formula, SyntaxError, Term};
