//! `demo diagonal|alpha` over the functions an `.rf` file defines.

use std::path::Path;

use muwork_core::corpus::load_rf_file;
use muwork_core::diagonal::{alpha_demo, diag_self_demo, DiagonalReport, FnList};
use serde_json::{Map, Value};

use super::config;
use crate::report::{failed, obj, to_value, usage, CliError, Report};
use crate::{DemoVerb, Opts};

pub fn dispatch(d: &DemoVerb, o: &Opts) -> Result<Report, CliError> {
    match d {
        DemoVerb::Diagonal { list } => {
            let l = load_list(list)?;
            let r = diag_self_demo(&l, &config(o)).map_err(failed)?;
            Ok(Report::new(fields(list, &r), format!("{r}\n")))
        }
        DemoVerb::Alpha { list, z } => {
            let l = load_list(list)?;
            if *z >= l.len() {
                return Err(usage(format!("--z {z} is out of range (the list has {} entries)", l.len())));
            }
            let (r, a) = alpha_demo(&l, *z, &config(o)).map_err(failed)?;
            let mut json = fields(list, &r);
            json.insert("alpha".into(), to_value(&a));
            Ok(Report::new(json, format!("{r}\n")))
        }
    }
}

/// The list is every definition of the file itself, in order.
fn load_list(path: &Path) -> Result<FnList, CliError> {
    let f = load_rf_file(path).map_err(failed)?;
    let names: Vec<&str> = f.own.iter().map(String::as_str).collect();
    if names.is_empty() {
        return Err(failed(format!("{}: defines no functions", path.display())));
    }
    FnList::from_names(f.env.clone(), &names).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn fields(list: &Path, r: &DiagonalReport) -> Map<String, Value> {
    let mut json = obj([("list", list.display().to_string().into())]);
    if let Value::Object(m) = to_value(r) {
        json.extend(m);
    }
    json
}
