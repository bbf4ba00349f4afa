use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error;
use trianglecf::formfactor::form_factor;
use trianglecf::oracle::{gamma_oracle, PlacedTriangle};
use trianglecf::sampling::random_triangles;
use trianglecf::validate::{check_many, Tolerances};
use trianglecf::{Correlation, EvalError, GeometryError, ShapeCase, Triangle};

use crate::args::{
    CheckArgs, ClassifyArgs, Cli, Command, EvalArgs, Format, FormFactorArgs, OracleArgs,
    OutputArgs, RadiusGrid,
};
use crate::table::{number_value, Cell, Document, Table};

pub const FORMAT_VERSION: u64 = 1;

/// The four triangles checked when `check` gets no sides.
pub const REFERENCE_TRIANGLES: [[f64; 3]; 4] = [
    [1.0, 1.5, 1.611],
    [1.0, 1.06, 1.127],
    [1.0, 1.5, 2.239],
    [1.0, 1.5, 2.470],
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Compute(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Input(_) | CliError::Geometry(_) | CliError::Write { .. } => 2,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Domain(d) => CliError::Input(d.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<trianglecf::Error> for CliError {
    fn from(e: trianglecf::Error) -> Self {
        match e {
            trianglecf::Error::Geometry(g) => CliError::Geometry(g),
            trianglecf::Error::Domain(d) => CliError::Input(d.to_string()),
            trianglecf::Error::Eval(e) => e.into(),
            trianglecf::Error::Quadrature(q) => CliError::Compute(q.to_string()),
        }
    }
}

/// Result of a subcommand that ran to completion; `passed` is false when a
/// tolerance check failed.
#[derive(Debug)]
pub struct Outcome {
    pub document: Document,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub passed: bool,
}

impl Outcome {
    pub fn render(&self) -> String {
        match self.format {
            Format::Csv => self.document.to_csv(),
            Format::Json => self.document.to_json(),
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Classify(a) => classify(a),
        Command::Eval(a) => eval(a),
        Command::Check(a) => check(a),
        Command::Oracle(a) => oracle(a),
        Command::Formfactor(a) => formfactor(a),
    }
}

fn triangle(sides: &[f64]) -> Result<Triangle, CliError> {
    match sides {
        [a, b, c] => Ok(Triangle::from_sides(*a, *b, *c)?),
        _ => Err(CliError::Input(format!(
            "--sides expects three comma-separated numbers, got {}",
            sides.len()
        ))),
    }
}

fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number_value(x)).collect())
}

fn meta(command: &str, inputs: Map<String, Value>, case: Option<ShapeCase>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), "trianglecf".into());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("format_version".into(), FORMAT_VERSION.into());
    m.insert("command".into(), command.into());
    m.insert("inputs".into(), Value::Object(inputs));
    if let Some(case) = case {
        m.insert("case".into(), case.tag().into());
    }
    m
}

fn sides_input(m: &Triangle) -> Map<String, Value> {
    let mut inputs = Map::new();
    inputs.insert("sides".into(), numbers(&m.sides()));
    inputs
}

fn finish(document: Document, output: OutputArgs, default: Format, passed: bool) -> Outcome {
    Outcome {
        document,
        format: output.format.unwrap_or(default),
        out: output.out,
        passed,
    }
}

/// Sorted, deduplicated radii from `--r`, or `n` uniform points on `[0, c]`.
fn radii(grid: &RadiusGrid, c: f64) -> Result<Vec<f64>, CliError> {
    match (&grid.r, grid.grid) {
        (Some(list), _) => sorted_non_negative(list, "--r"),
        (None, Some(n)) => uniform(n, c, "--grid"),
        (None, None) => Err(CliError::Input("one of --r or --grid is required".into())),
    }
}

fn sorted_non_negative(list: &[f64], flag: &str) -> Result<Vec<f64>, CliError> {
    if let Some(bad) = list.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(CliError::Input(format!(
            "{flag} values must be finite and non-negative, got {bad}"
        )));
    }
    let mut v = list.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

fn uniform(n: usize, end: f64, flag: &str) -> Result<Vec<f64>, CliError> {
    match n {
        0 => Err(CliError::Input(format!("{flag} needs at least one point"))),
        1 => Ok(vec![0.0]),
        _ => Ok((0..n)
            .map(|k| if k == n - 1 { end } else { end * k as f64 / (n - 1) as f64 })
            .collect()),
    }
}

fn grid_input(inputs: &mut Map<String, Value>, grid: &RadiusGrid) {
    if let Some(r) = &grid.r {
        inputs.insert("r".into(), numbers(r));
    }
    if let Some(n) = grid.grid {
        inputs.insert("grid".into(), (n as u64).into());
    }
}

fn classify(args: ClassifyArgs) -> Result<Outcome, CliError> {
    let m = triangle(&args.sides.sides)?;
    let cf = Correlation::new(m)?;
    let case = cf.case();
    let format = args.output.format.unwrap_or(Format::Json);
    let angles = [("alpha", m.alpha), ("beta", m.beta), ("gamma", m.gamma_ang)];
    let scalars: Vec<(&str, f64)> = [("a", m.a), ("b", m.b), ("c", m.c)]
        .into_iter()
        .chain(angles.iter().map(|&(k, v)| (k, v)))
        .chain(angles.iter().map(|&(k, v)| (k, v.to_degrees())))
        .chain([("h_a", m.h_a), ("h_b", m.h_b), ("h_c", m.h_c)])
        .chain([("area", m.area), ("perimeter", m.perimeter)])
        .collect();

    let ladder = cf.ladder();
    let (table, sections) = match format {
        Format::Json => {
            let mut t = Table::new(&["index", "point", "r"]);
            for i in 0..7 {
                t.push(vec![
                    Cell::Int(i as u64),
                    ladder.kinds[i].name().into(),
                    ladder.points[i].into(),
                ]);
            }
            let obj = |pairs: &[(&str, f64)]| {
                Value::Object(pairs.iter().map(|&(k, v)| (k.to_owned(), number_value(v))).collect())
            };
            let mut tri = Map::new();
            tri.insert("sides".into(), obj(&scalars[0..3]));
            tri.insert("angles_rad".into(), obj(&scalars[3..6]));
            tri.insert("angles_deg".into(), obj(&scalars[6..9]));
            tri.insert("heights".into(), obj(&scalars[9..12]));
            tri.insert("area".into(), number_value(m.area));
            tri.insert("perimeter".into(), number_value(m.perimeter));
            tri.insert("case".into(), case.tag().into());
            (t, vec![("triangle", Value::Object(tri))])
        }
        Format::Csv => {
            let mut t = Table::new(&["quantity", "value"]);
            for (i, &(k, v)) in scalars.iter().enumerate() {
                let name = if (6..9).contains(&i) { format!("{k}_deg") } else { k.to_owned() };
                t.push(vec![name.into(), v.into()]);
            }
            t.push(vec!["case".into(), case.tag().into()]);
            for i in 0..7 {
                t.push(vec![
                    format!("ladder_{}_{}", i, ladder.kinds[i].name()).into(),
                    ladder.points[i].into(),
                ]);
            }
            (t, Vec::new())
        }
    };
    let document = Document {
        meta: meta("classify", sides_input(&m), Some(case)),
        sections,
        table,
    };
    Ok(finish(document, args.output, Format::Json, true))
}

fn eval(args: EvalArgs) -> Result<Outcome, CliError> {
    let m = triangle(&args.sides.sides)?;
    let cf = Correlation::new(m)?;
    let grid = radii(&args.grid, m.c)?;
    let values: Result<Vec<_>, EvalError> = grid.par_iter().map(|&r| cf.evaluate(r)).collect();
    let mut table = Table::new(&["r", "gamma", "d1", "d2", "d3"]);
    for v in values? {
        table.push(vec![v.r.into(), v.gamma.into(), v.d1.into(), v.d2.into(), v.d3.into()]);
    }
    let mut inputs = sides_input(&m);
    grid_input(&mut inputs, &args.grid);
    let document = Document {
        meta: meta("eval", inputs, Some(cf.case())),
        sections: Vec::new(),
        table,
    };
    Ok(finish(document, args.output, Format::Csv, true))
}

fn check(args: CheckArgs) -> Result<Outcome, CliError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let mut inputs = Map::new();
    let (triangles, case) = match (&args.sides, args.random) {
        (Some(sides), _) => {
            let m = triangle(sides)?;
            inputs.insert("sides".into(), numbers(&m.sides()));
            (vec![m.sides()], Some(Correlation::new(m)?.case()))
        }
        (None, Some(n)) => {
            inputs.insert("random".into(), (n as u64).into());
            inputs.insert("seed".into(), args.seed.into());
            (random_triangles(n, args.seed), None)
        }
        (None, None) => (REFERENCE_TRIANGLES.to_vec(), None),
    };
    inputs.insert("tol".into(), number_value(args.tol));
    let tol = Tolerances {
        oracle: args.tol,
        ..Tolerances::default()
    };
    let report = check_many(&triangles, &tol)?;
    let mut table = Table::new(&["a", "b", "c", "invariant", "defect", "tolerance", "pass"]);
    for row in &report.rows {
        let mut s = row.sides;
        s.sort_by(f64::total_cmp);
        table.push(vec![
            s[0].into(),
            s[1].into(),
            s[2].into(),
            row.name.clone().into(),
            row.defect.into(),
            row.tolerance.into(),
            row.pass.into(),
        ]);
    }
    let passed = report.passed();
    let document = Document {
        meta: meta("check", inputs, case),
        sections: vec![("passed", Value::Bool(passed))],
        table,
    };
    Ok(finish(document, args.output, Format::Json, passed))
}

fn oracle(args: OracleArgs) -> Result<Outcome, CliError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let m = triangle(&args.sides.sides)?;
    let cf = Correlation::new(m)?;
    let placed = PlacedTriangle::from_metrics(&m);
    let grid = radii(&args.grid, m.c)?;
    let quad_tol = (1e-2 * args.tol).clamp(1e-13, 1e-9);
    let rows: Result<Vec<(f64, f64, f64)>, CliError> = grid
        .par_iter()
        .map(|&r| {
            let o = gamma_oracle(&placed, r, quad_tol)
                .map_err(|e| CliError::Compute(e.to_string()))?;
            Ok((r, o, cf.correlation(r)?))
        })
        .collect();
    let mut table = Table::new(&["r", "oracle", "gamma", "defect"]);
    let mut worst = 0.0f64;
    for (r, o, g) in rows? {
        let d = (g - o).abs();
        worst = worst.max(d);
        table.push(vec![r.into(), o.into(), g.into(), d.into()]);
    }
    let mut inputs = sides_input(&m);
    grid_input(&mut inputs, &args.grid);
    inputs.insert("tol".into(), number_value(args.tol));
    let passed = worst <= args.tol;
    let document = Document {
        meta: meta("oracle", inputs, Some(cf.case())),
        sections: vec![
            ("max_defect", number_value(worst)),
            ("passed", Value::Bool(passed)),
        ],
        table,
    };
    Ok(finish(document, args.output, Format::Csv, passed))
}

fn formfactor(args: FormFactorArgs) -> Result<Outcome, CliError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let m = triangle(&args.sides.sides)?;
    let cf = Correlation::new(m)?;
    let mut inputs = sides_input(&m);
    let qs = match (&args.q, args.grid) {
        (Some(list), _) => {
            inputs.insert("q".into(), numbers(list));
            sorted_non_negative(list, "--q")?
        }
        (None, Some(n)) => {
            let qmax = args.qmax.unwrap_or(50.0 / m.c);
            if !(qmax.is_finite() && qmax > 0.0) {
                return Err(CliError::Input(format!("--qmax must be positive, got {qmax}")));
            }
            inputs.insert("grid".into(), (n as u64).into());
            inputs.insert("qmax".into(), number_value(qmax));
            uniform(n, qmax, "--grid")?
        }
        (None, None) => return Err(CliError::Input("one of --q or --grid is required".into())),
    };
    inputs.insert("tol".into(), number_value(args.tol));
    let values: Result<Vec<f64>, trianglecf::Error> =
        qs.par_iter().map(|&q| form_factor(&cf, q, args.tol)).collect();
    let mut table = Table::new(&["q", "F"]);
    for (q, f) in qs.iter().zip(values?) {
        table.push(vec![(*q).into(), f.into()]);
    }
    let document = Document {
        meta: meta("formfactor", inputs, Some(cf.case())),
        sections: Vec::new(),
        table,
    };
    Ok(finish(document, args.output, Format::Csv, true))
}
