//! `godel encode|decode|sub|check|isdef|negation`.

use std::path::Path;

use muwork_core::godel::{
    check_proof_detailed, decode, encode, is_def, negated_self_code, parse_formula, parse_term, sub, symbols_of_code,
    GNum, IsDef, Proof, Signature, Syntax,
};
use muwork_core::nat::Nat;
use muwork_core::rf::DefEnv;
use serde_json::Value;

use super::{env_for, read};
use crate::report::{failed, obj, usage, CliError, Report};
use crate::{GodelVerb, Opts};

pub fn dispatch(g: &GodelVerb, o: &Opts) -> Result<Report, CliError> {
    match g {
        GodelVerb::Encode { text, file } => encode_verb(text, &env_for(file.as_deref())?),
        GodelVerb::Decode { code, file } => decode_verb(code, &env_for(file.as_deref())?),
        GodelVerb::Sub { y, u, v, file } => sub_verb([y, u, v], &env_for(file.as_deref())?),
        GodelVerb::Check { proof, target, file } => check_verb(proof, target, &env_for(file.as_deref())?),
        GodelVerb::Isdef { fml, u, file, emit_proof } => {
            isdef_verb(fml, u, &env_for(file.as_deref())?, o.budget, *emit_proof)
        }
        GodelVerb::Negation => {
            let (code, report) = negated_self_code();
            let json = obj([("code", code.to_string().into()), ("report", report.clone().into())]);
            Ok(Report::new(json, format!("{report}\n")))
        }
    }
}

fn parse_code(s: &str) -> Result<GNum, CliError> {
    s.parse::<GNum>().map_err(|_| usage(format!("`{s}` is not a code")))
}

fn parse_syntax(text: &str) -> Result<Syntax, CliError> {
    match parse_formula(text) {
        Ok(f) => Ok(Syntax::Formula(f)),
        Err(fe) => parse_term(text).map(Syntax::Term).map_err(|_| usage(format!("not a term or formula: {fe}"))),
    }
}

fn kind_and_text(x: &Syntax) -> (&'static str, String) {
    match x {
        Syntax::Term(t) => ("term", t.to_string()),
        Syntax::Formula(f) => ("formula", f.to_string()),
    }
}

fn encode_verb(text: &str, env: &DefEnv) -> Result<Report, CliError> {
    let x = parse_syntax(text)?;
    let code = encode(&x, &Signature::from_env(env)).map_err(usage)?;
    let symbols = symbols_of_code(&code).map_err(failed)?;
    let (kind, shown) = kind_and_text(&x);
    let json = obj([
        ("kind", kind.into()),
        ("text", shown.into()),
        ("symbols", symbols.into()),
        ("code", code.to_string().into()),
    ]);
    Ok(Report::new(json, format!("{code}\n")))
}

fn decode_verb(code: &str, env: &DefEnv) -> Result<Report, CliError> {
    let x = decode(&parse_code(code)?, &Signature::from_env(env)).map_err(failed)?;
    let (kind, shown) = kind_and_text(&x);
    let json = obj([("kind", kind.into()), ("text", shown.clone().into())]);
    Ok(Report::new(json, format!("{shown}\n")))
}

fn sub_verb(codes: [&String; 3], env: &DefEnv) -> Result<Report, CliError> {
    let [y, u, v] = codes.map(|c| parse_code(c));
    let sig = Signature::from_env(env);
    let out = sub(&y?, &u?, &v?, &sig).map_err(failed)?;
    let (_, shown) = kind_and_text(&decode(&out, &sig).map_err(failed)?);
    let json = obj([("code", out.to_string().into()), ("text", shown.clone().into())]);
    Ok(Report::new(json, format!("{out}\n{shown}\n")))
}

fn check_verb(path: &Path, target: &str, env: &DefEnv) -> Result<Report, CliError> {
    let target = parse_formula(target).map_err(|e| usage(format!("target: {e}")))?;
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| failed(format!("{}: {e}", path.display())))?;
    let proof = Proof::from_json(&v, env).map_err(|e| failed(format!("{}: {e}", path.display())))?;
    let verdict = check_proof_detailed(&proof, &target, env);
    let mut json = obj([
        ("target", target.to_string().into()),
        ("lines", proof.lines.len().into()),
        ("accepted", verdict.is_ok().into()),
    ]);
    let text = match &verdict {
        Ok(()) => format!("accepted ({} lines)\n", proof.lines.len()),
        Err(e) => {
            json.insert("error".into(), serde_json::json!({ "line": e.line, "message": e.msg }));
            format!("rejected: {e}\n")
        }
    };
    Ok(Report::new(json, text))
}

fn isdef_verb(fml: &str, u: &str, env: &DefEnv, budget: u64, emit_proof: bool) -> Result<Report, CliError> {
    let sig = Signature::from_env(env);
    let code = if fml.bytes().all(|b| b.is_ascii_digit()) {
        parse_code(fml)?
    } else {
        let f = parse_formula(fml).map_err(|e| usage(format!("fml: {e}")))?;
        encode(&Syntax::Formula(f), &sig).map_err(usage)?
    };
    let u: Nat = u.parse().map_err(|_| usage(format!("`{u}` is not a natural number")))?;
    let (r, w) = is_def(&code, &u, budget, env).map_err(failed)?;
    let (_, w_text) = kind_and_text(&decode(&w, &sig).map_err(failed)?);
    let mut json = obj([
        ("fml", code.to_string().into()),
        ("u", serde_json::to_value(&u).expect("naturals serialize")),
        ("w", w.to_string().into()),
        ("w_formula", w_text.clone().into()),
    ]);
    let text = match &r {
        IsDef::Proved(p) => {
            json.insert("isdef".into(), "proved".into());
            json.insert("proof_lines".into(), p.lines.len().into());
            if emit_proof {
                json.insert("proof".into(), p.to_json());
            }
            let mut t = format!("IsDef holds: {w_text} has a proof of {} lines\n", p.lines.len());
            if emit_proof {
                t += &serde_json::to_string_pretty(&p.to_json()).expect("proofs serialize");
                t.push('\n');
            }
            t
        }
        IsDef::Unknown => {
            json.insert("isdef".into(), "unknown".into());
            format!("unknown: no proof of {w_text} found within budget {budget}\n")
        }
    };
    Ok(Report::new(json, text))
}
