//! Command layer of the `fatlab` binary: run configuration, dispatch over
//! the engine, and report assembly.

pub mod report;

use std::path::PathBuf;
use std::sync::Arc;

use fatlab::cache::DiskCache;
use fatlab::ideal::Lab;
use fatlab::invariants::{self, GammaBracket};
use fatlab::scalar::{Field, FieldConfig, PrimeField, Rationals};
use fatlab::spec_format::{self, SchemeSpec};
use fatlab::verifier::{self, ContainmentRecord, CorpusEntry, CorpusSelector, SuiteId, SuiteSpec};
use fatlab::{Error, Result};
use serde::{Deserialize, Serialize};

use report::{Bracket, Format, InvariantRow, ReportBody, ReportDocument, ReportHeader};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Value of `--spec` that selects `I = M` instead of a scheme file.
pub const M_CONTROL: &str = "M-control";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Alpha,
    Beta,
    Hilbert,
    Regularity,
    Gamma,
    Contains { m: usize, j: usize, r: usize },
    Suite { id: SuiteId },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Alpha => "alpha",
            Command::Beta => "beta",
            Command::Hilbert => "hilbert",
            Command::Regularity => "regularity",
            Command::Gamma => "gamma",
            Command::Contains { .. } => "contains",
            Command::Suite { .. } => "suite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecSource {
    File { path: PathBuf },
    MControl,
}

impl SpecSource {
    pub fn parse_arg(arg: &str) -> Self {
        if arg == M_CONTROL {
            SpecSource::MControl
        } else {
            SpecSource::File { path: PathBuf::from(arg) }
        }
    }
}

/// Everything that determines a run. Serialized into every report header.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub spec: Option<SpecSource>,
    /// Overrides the field named in the spec file.
    pub field: Option<FieldConfig>,
    pub m_max: Option<usize>,
    pub r_max: Option<usize>,
    pub t_max: Option<usize>,
    pub k_max: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            spec: None,
            field: None,
            m_max: None,
            r_max: None,
            t_max: None,
            k_max: None,
            seeds: None,
            format: Format::Json,
            out: None,
            cache_dir: None,
        }
    }
}

/// Parses `rationals`, `prime:<p>` or a bare prime.
pub fn parse_field(s: &str) -> Result<FieldConfig> {
    let s = s.trim();
    if s == "rationals" {
        return Ok(FieldConfig::Rationals);
    }
    let digits = s.strip_prefix("prime:").unwrap_or(s);
    let p = digits.parse::<u64>().map_err(|_| Error::InvalidParameter(format!("unknown field '{s}'")))?;
    FieldConfig::prime(p)
}

fn cache(config: &RunConfig) -> Result<Option<Arc<DiskCache>>> {
    Ok(match &config.cache_dir {
        Some(dir) => Some(Arc::new(DiskCache::open(dir)?)),
        None => DiskCache::from_env()?.map(Arc::new),
    })
}

fn load_spec(source: &SpecSource) -> Result<Option<SchemeSpec>> {
    match source {
        SpecSource::MControl => Ok(None),
        SpecSource::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            spec_format::parse(&text).map(Some)
        }
    }
}

/// Runs one command. Module errors become an error report with exit
/// status 2 rather than an `Err`.
pub fn run_command(config: &RunConfig) -> ReportDocument {
    let default_field = match &config.command {
        Command::Suite { id } if id.needs_rationals() => FieldConfig::Rationals,
        _ => FieldConfig::default(),
    };
    let seeds = config.seeds.clone().unwrap_or_default();
    let staged = (|| {
        let spec = config.spec.as_ref().map(load_spec).transpose()?.flatten();
        let field = config.field.clone().or_else(|| spec.as_ref().map(|s| s.field.clone())).unwrap_or(default_field);
        Ok::<_, Error>((spec, field))
    })();
    let (spec, field) = match staged {
        Ok(v) => v,
        Err(e) => return error_doc(config, config.field.clone().unwrap_or_default(), seeds, e),
    };
    let result = match &field {
        FieldConfig::Prime { p } => PrimeField::new(*p).and_then(|f| dispatch(config, f, spec.as_ref())),
        FieldConfig::Rationals => dispatch(config, Rationals, spec.as_ref()),
    };
    match result {
        Ok((body, exit, seeds)) => ReportDocument {
            header: ReportHeader::new(config, field.describe(), seeds),
            body,
            exit_status: exit,
        },
        Err(e) => error_doc(config, field, seeds, e),
    }
}

fn error_doc(config: &RunConfig, field: FieldConfig, seeds: Vec<u64>, e: Error) -> ReportDocument {
    ReportDocument {
        header: ReportHeader::new(config, field.describe(), seeds),
        body: ReportBody::Error { message: e.to_string() },
        exit_status: EXIT_ERROR,
    }
}

/// Writes the report to `config.out` or returns its bytes for stdout.
pub fn write_report(config: &RunConfig, doc: &ReportDocument) -> Result<Option<Vec<u8>>> {
    let bytes = report::emit(doc, config.format)?;
    match &config.out {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(None)
        }
        None => Ok(Some(bytes)),
    }
}

type Dispatched = (ReportBody, i32, Vec<u64>);

fn dispatch<F: Field>(config: &RunConfig, field: F, spec: Option<&SchemeSpec>) -> Result<Dispatched> {
    let disk = cache(config)?;
    match &config.command {
        Command::Suite { id } => {
            let mut s = SuiteSpec::new(*id);
            if let Some(v) = config.m_max {
                s.m_max = v;
            }
            if let Some(v) = config.r_max {
                s.r_max = v;
            }
            if let Some(v) = config.t_max {
                s.t_max = v;
            }
            if let Some(v) = config.k_max {
                s.k_max = v;
            }
            if let Some(v) = &config.seeds {
                s.seeds = v.clone();
            }
            match (&config.spec, spec) {
                (Some(SpecSource::MControl), _) if *id != SuiteId::ConjMain => {
                    return Err(Error::InvalidParameter(format!("{M_CONTROL} only applies to the conj-main suite")));
                }
                (Some(SpecSource::MControl), _) => s.corpus = CorpusSelector::MControl,
                (_, Some(sp)) => {
                    s.corpus = CorpusSelector::Entries { entries: vec![CorpusEntry::from_recipe(sp.recipe.clone())] };
                }
                _ => {}
            }
            let verdict = verifier::run_suite(&s, field, disk);
            let exit = verdict.exit_code();
            let seeds = s.seeds.clone();
            Ok((ReportBody::Suite { spec: Box::new(s), verdict }, exit, seeds))
        }
        Command::Contains { m, j, r } => {
            let (ambient, scheme_id, z) = match spec {
                Some(sp) => (sp.recipe.ambient(), sp.recipe.id(), Some(sp.realize(&field)?)),
                None if config.spec == Some(SpecSource::MControl) => (2, "M-N2".to_string(), None),
                None => return Err(Error::InvalidParameter("contains needs --spec".into())),
            };
            let lab = Lab::new(field, ambient)?.with_disk_cache(disk);
            let (base, contained) = match &z {
                Some(z) => (lab.scheme(z)?, lab.scheme(&z.scale(*m as u32)?)?),
                None => (lab.maximal(), lab.power(&lab.maximal(), *m)?),
            };
            let container = lab.shift_by_m(&lab.power(&base, *r)?, *j)?;
            let c = lab.contains(&container, &contained)?;
            let witness_verified = match &c.witness {
                Some((d, w)) => Some(lab.verify_witness(&container, &contained, *d, w)?),
                None => None,
            };
            let result = ContainmentRecord { report: c.report, witness_verified };
            let body = ReportBody::Containment { scheme_id: scheme_id.clone(), m: *m, j: *j, r: *r, result };
            Ok((body, EXIT_OK, Vec::new()))
        }
        cmd => {
            let sp = spec.ok_or_else(|| Error::InvalidParameter(format!("{} needs a scheme --spec", cmd.name())))?;
            let rows = invariant_rows(config, &field, sp, disk)?;
            Ok((ReportBody::Invariants { command: cmd.name().to_string(), rows }, EXIT_OK, Vec::new()))
        }
    }
}

fn invariant_rows<F: Field>(
    config: &RunConfig,
    field: &F,
    spec: &SchemeSpec,
    disk: Option<Arc<DiskCache>>,
) -> Result<Vec<InvariantRow>> {
    let z = spec.realize(field)?;
    let lab = Lab::new(field.clone(), z.ambient())?.with_disk_cache(disk);
    let id = spec.recipe.id();
    let m_max = config.m_max.unwrap_or(if config.command == Command::Gamma { 6 } else { 3 });
    if m_max == 0 {
        return Err(Error::InvalidParameter("--m-max must be positive".into()));
    }
    let mut rows = Vec::with_capacity(m_max);
    let mut alphas = Vec::new();
    for m in 1..=m_max {
        let wrap = |e: Error| e.in_case(format!("{id} m={m}"));
        let ideal = lab.scheme(&z.scale(m as u32).map_err(wrap)?).map_err(wrap)?;
        let mut row = InvariantRow { scheme_id: id.clone(), m, ..Default::default() };
        match config.command {
            Command::Alpha => row.alpha = Some(ideal.alpha().map_err(wrap)?),
            Command::Beta => {
                row.alpha = Some(ideal.alpha().map_err(wrap)?);
                row.beta = Some(invariants::beta(&ideal).map_err(wrap)?);
            }
            Command::Regularity => row.regularity = Some(ideal.regularity().map_err(wrap)?),
            Command::Hilbert => {
                let t_max = match config.t_max {
                    Some(t) => t,
                    None => ideal.regularity().map_err(wrap)?,
                };
                row.hilbert = (0..=t_max).map(|t| ideal.hilbert_function(t)).collect::<Result<_>>().map_err(wrap)?;
            }
            Command::Gamma => {
                let a = ideal.alpha().map_err(wrap)?;
                alphas.push((m, a));
                row.alpha = Some(a);
                let b = GammaBracket::from_alphas(z.ambient(), alphas.clone())?;
                row.gamma = Some(Bracket::from(&b));
            }
            Command::Contains { .. } | Command::Suite { .. } => unreachable!("handled by dispatch"),
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arguments() {
        assert_eq!(parse_field("rationals").unwrap(), FieldConfig::Rationals);
        assert_eq!(parse_field("prime:101").unwrap(), FieldConfig::Prime { p: 101 });
        assert_eq!(parse_field("2147483647").unwrap(), FieldConfig::default());
        assert!(matches!(parse_field("100"), Err(Error::NotPrime(100))));
        assert!(parse_field("reals").is_err());
    }

    #[test]
    fn missing_spec_is_an_error_report() {
        let doc = run_command(&RunConfig::new(Command::Alpha));
        assert_eq!(doc.exit_status, EXIT_ERROR);
        assert!(matches!(doc.body, ReportBody::Error { .. }));
    }
}
