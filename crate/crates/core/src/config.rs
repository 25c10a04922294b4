//! Line-oriented scenario configuration.
//!
//! The format is a small INI dialect chosen for diff-friendliness and
//! zero-dependency parsing:
//!
//! ```text
//! # satellite links: either explicit chain parameters ...
//! [channel.s1]
//! p_stay_good = 0.999
//! p_stay_bad = 0.818
//!
//! # ... or calibration targets
//! [channel.s2]
//! pi_bad = 0.09311
//! zero_loss_prob = 0.5525
//! window = 10
//!
//! # one or more sweep blocks; each defines a grid of cells
//! [sweep]
//! n = 10
//! lb = 0, 0.2, 0.4, 0.6, 0.8, 1
//! dt = 0, 0.2, 0.4, 0.6, 0.8, 1
//! nk = 10/2, 10/4, 10/6, 10/8, 10/10
//! q = 256
//! mode = exact
//!
//! # optional Monte-Carlo columns
//! [mc]
//! rounds = 1000000
//! seed = 42
//! tolerance_sigma = 3
//!
//! [output]
//! path = out.csv
//! format = csv
//! ```
//!
//! Grammar (EBNF):
//!
//! ```text
//! config   = { line } ;
//! line     = ( section | pair | blank ) [ comment ] newline ;
//! section  = "[" name { "." name } "]" ;
//! pair     = key "=" value ;
//! key      = name ;
//! value    = scalar | list ;
//! list     = scalar { "," scalar } ;
//! scalar   = number | word | pair-of-ints ;   (* pair-of-ints = int "/" int *)
//! comment  = "#" { any } ;
//! ```

use std::path::PathBuf;

use thiserror::Error;

use crate::channel::{ChannelError, GilbertElliottChannel};
use crate::gf::FieldSpec;
use crate::strategy::{NcMode, PathPair};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: {field} = {value} is out of range ({reason})")]
    Range {
        line: usize,
        field: String,
        value: f64,
        reason: String,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

fn schema(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema { line, message: message.into() }
}

/// A channel given either directly or through calibration targets.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpecEntry {
    Explicit { p_stay_good: f64, p_stay_bad: f64 },
    Calibration { pi_bad: f64, zero_loss_prob: f64, window: usize },
}

impl ChannelSpecEntry {
    pub fn resolve(&self) -> Result<GilbertElliottChannel, ChannelError> {
        match *self {
            ChannelSpecEntry::Explicit { p_stay_good, p_stay_bad } => {
                GilbertElliottChannel::new(p_stay_good, p_stay_bad)
            }
            ChannelSpecEntry::Calibration { pi_bad, zero_loss_prob, window } => {
                GilbertElliottChannel::calibrate(pi_bad, zero_loss_prob, window)
            }
        }
    }
}

/// One grid of sweep cells: a PD+PS panel (lb x dt) and/or an NC panel
/// (nk pairs x lb).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub lb: Vec<f64>,
    pub dt: Vec<f64>,
    pub nk: Vec<(usize, usize)>,
    /// Block size used for PD+PS rows (reporting and simulation).
    pub block_n: Option<usize>,
    pub field_size_q: u64,
    pub mode: NcMode,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            lb: Vec::new(),
            dt: Vec::new(),
            nk: Vec::new(),
            block_n: None,
            field_size_q: 256,
            mode: NcMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpec {
    pub rounds: u64,
    pub seed: u64,
    pub tolerance_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { path: None, format: OutputFormat::Csv }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Channels in declaration order; exactly two are required.
    pub channels: Vec<(String, ChannelSpecEntry)>,
    pub sweeps: Vec<SweepSpec>,
    pub mc: Option<McSpec>,
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Parser::new(text).run()
    }

    /// Resolve the two declared channels into a path pair, calibrating
    /// where needed.
    pub fn resolve_paths(&self) -> Result<PathPair, ConfigError> {
        let c1 = self.channels[0].1.resolve()?;
        let c2 = self.channels[1].1.resolve()?;
        Ok(PathPair::new(c1, c2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Channel(usize),
    Sweep(usize),
    Mc,
    Output,
}

struct Parser<'a> {
    text: &'a str,
    channels: Vec<(String, RawChannel)>,
    sweeps: Vec<SweepSpec>,
    mc: Option<McSpec>,
    output: OutputSpec,
    saw_mc: bool,
}

#[derive(Default)]
struct RawChannel {
    p_stay_good: Option<(usize, f64)>,
    p_stay_bad: Option<(usize, f64)>,
    pi_bad: Option<(usize, f64)>,
    zero_loss_prob: Option<(usize, f64)>,
    window: Option<(usize, usize)>,
    decl_line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            channels: Vec::new(),
            sweeps: Vec::new(),
            mc: None,
            output: OutputSpec::default(),
            saw_mc: false,
        }
    }

    fn run(mut self) -> Result<ScenarioConfig, ConfigError> {
        let mut section: Option<Section> = None;
        for (idx, raw_line) in self.text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| schema(lineno, "unterminated section header"))?
                    .trim();
                section = Some(self.open_section(lineno, name)?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| schema(lineno, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let section = section.ok_or_else(|| schema(lineno, "key before any section"))?;
            self.set(lineno, section, key, value)?;
        }
        self.finish()
    }

    fn open_section(&mut self, lineno: usize, name: &str) -> Result<Section, ConfigError> {
        if let Some(channel_name) = name.strip_prefix("channel.") {
            if channel_name.is_empty() {
                return Err(schema(lineno, "channel section needs a name"));
            }
            if self.channels.iter().any(|(n, _)| n == channel_name) {
                return Err(schema(lineno, format!("duplicate channel `{channel_name}`")));
            }
            self.channels.push((
                channel_name.to_string(),
                RawChannel { decl_line: lineno, ..RawChannel::default() },
            ));
            return Ok(Section::Channel(self.channels.len() - 1));
        }
        match name {
            "sweep" => {
                self.sweeps.push(SweepSpec::default());
                Ok(Section::Sweep(self.sweeps.len() - 1))
            }
            "mc" => {
                if self.saw_mc {
                    return Err(schema(lineno, "duplicate [mc] section"));
                }
                self.saw_mc = true;
                self.mc = Some(McSpec { rounds: 100_000, seed: 0, tolerance_sigma: 3.0 });
                Ok(Section::Mc)
            }
            "output" => Ok(Section::Output),
            other => Err(schema(lineno, format!("unknown section `[{other}]`"))),
        }
    }

    fn set(
        &mut self,
        lineno: usize,
        section: Section,
        key: &str,
        value: &str,
    ) -> Result<(), ConfigError> {
        match section {
            Section::Channel(i) => self.set_channel(lineno, i, key, value),
            Section::Sweep(i) => self.set_sweep(lineno, i, key, value),
            Section::Mc => self.set_mc(lineno, key, value),
            Section::Output => self.set_output(lineno, key, value),
        }
    }

    fn set_channel(
        &mut self,
        lineno: usize,
        idx: usize,
        key: &str,
        value: &str,
    ) -> Result<(), ConfigError> {
        let ch = &mut self.channels[idx].1;
        match key {
            "p_stay_good" => ch.p_stay_good = Some((lineno, parse_prob(lineno, key, value)?)),
            "p_stay_bad" => ch.p_stay_bad = Some((lineno, parse_prob(lineno, key, value)?)),
            "pi_bad" => ch.pi_bad = Some((lineno, parse_prob(lineno, key, value)?)),
            "zero_loss_prob" => {
                ch.zero_loss_prob = Some((lineno, parse_prob(lineno, key, value)?))
            }
            "window" => ch.window = Some((lineno, parse_int(lineno, key, value)? as usize)),
            other => return Err(schema(lineno, format!("unknown channel key `{other}`"))),
        }
        Ok(())
    }

    fn set_sweep(
        &mut self,
        lineno: usize,
        idx: usize,
        key: &str,
        value: &str,
    ) -> Result<(), ConfigError> {
        let sweep = &mut self.sweeps[idx];
        match key {
            "lb" => sweep.lb = parse_prob_list(lineno, key, value)?,
            "dt" => sweep.dt = parse_prob_list(lineno, key, value)?,
            "nk" => {
                sweep.nk = value
                    .split(',')
                    .map(|item| parse_nk(lineno, item.trim()))
                    .collect::<Result<_, _>>()?
            }
            "n" => sweep.block_n = Some(parse_int(lineno, key, value)? as usize),
            "q" => {
                let q = parse_int(lineno, key, value)?;
                FieldSpec::new(q).map_err(|e| schema(lineno, e.to_string()))?;
                sweep.field_size_q = q;
            }
            "mode" => {
                sweep.mode = match value {
                    "exact" => NcMode::Exact,
                    "paper" => NcMode::Paper,
                    other => {
                        return Err(schema(
                            lineno,
                            format!("mode must be `exact` or `paper`, got `{other}`"),
                        ))
                    }
                }
            }
            other => return Err(schema(lineno, format!("unknown sweep key `{other}`"))),
        }
        Ok(())
    }

    fn set_mc(&mut self, lineno: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        let mc = self.mc.as_mut().expect("mc section opened");
        match key {
            "rounds" => {
                mc.rounds = parse_int(lineno, key, value)?;
                if mc.rounds == 0 {
                    return Err(schema(lineno, "rounds must be >= 1"));
                }
            }
            "seed" => mc.seed = parse_int(lineno, key, value)?,
            "tolerance_sigma" => {
                mc.tolerance_sigma = parse_float(lineno, key, value)?;
                if mc.tolerance_sigma <= 0.0 {
                    return Err(schema(lineno, "tolerance_sigma must be positive"));
                }
            }
            other => return Err(schema(lineno, format!("unknown mc key `{other}`"))),
        }
        Ok(())
    }

    fn set_output(&mut self, lineno: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "path" => self.output.path = Some(PathBuf::from(value)),
            "format" => {
                self.output.format = match value {
                    "csv" => OutputFormat::Csv,
                    "table" => OutputFormat::Table,
                    other => {
                        return Err(schema(
                            lineno,
                            format!("format must be `csv` or `table`, got `{other}`"),
                        ))
                    }
                }
            }
            other => return Err(schema(lineno, format!("unknown output key `{other}`"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<ScenarioConfig, ConfigError> {
        let mut channels = Vec::new();
        for (name, raw) in self.channels {
            channels.push((name, raw.validate()?));
        }
        if channels.len() != 2 {
            return Err(schema(
                1,
                format!("exactly two [channel.*] sections are required, found {}", channels.len()),
            ));
        }
        Ok(ScenarioConfig {
            channels,
            sweeps: self.sweeps,
            mc: self.mc,
            output: self.output,
        })
    }
}

impl RawChannel {
    fn validate(self) -> Result<ChannelSpecEntry, ConfigError> {
        let explicit = self.p_stay_good.is_some() || self.p_stay_bad.is_some();
        let calibrated =
            self.pi_bad.is_some() || self.zero_loss_prob.is_some() || self.window.is_some();
        match (explicit, calibrated) {
            (true, true) => Err(schema(
                self.decl_line,
                "channel mixes explicit parameters with calibration targets",
            )),
            (true, false) => {
                let g = self.p_stay_good.ok_or_else(|| {
                    schema(self.decl_line, "explicit channel needs p_stay_good")
                })?;
                let b = self
                    .p_stay_bad
                    .ok_or_else(|| schema(self.decl_line, "explicit channel needs p_stay_bad"))?;
                Ok(ChannelSpecEntry::Explicit { p_stay_good: g.1, p_stay_bad: b.1 })
            }
            (false, true) => {
                let pi = self
                    .pi_bad
                    .ok_or_else(|| schema(self.decl_line, "calibrated channel needs pi_bad"))?;
                let z = self.zero_loss_prob.ok_or_else(|| {
                    schema(self.decl_line, "calibrated channel needs zero_loss_prob")
                })?;
                let w = self
                    .window
                    .ok_or_else(|| schema(self.decl_line, "calibrated channel needs window"))?;
                if w.1 < 2 {
                    return Err(schema(w.0, "calibration window must be >= 2"));
                }
                Ok(ChannelSpecEntry::Calibration {
                    pi_bad: pi.1,
                    zero_loss_prob: z.1,
                    window: w.1,
                })
            }
            (false, false) => Err(schema(
                self.decl_line,
                "channel needs either (p_stay_good, p_stay_bad) or (pi_bad, zero_loss_prob, window)",
            )),
        }
    }
}

fn parse_float(lineno: usize, field: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| schema(lineno, format!("{field}: `{value}` is not a number")))
}

fn parse_prob(lineno: usize, field: &str, value: &str) -> Result<f64, ConfigError> {
    let v = parse_float(lineno, field, value)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(ConfigError::Range {
            line: lineno,
            field: field.to_string(),
            value: v,
            reason: "probabilities must lie in [0, 1]".into(),
        });
    }
    Ok(v)
}

fn parse_prob_list(lineno: usize, field: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|item| parse_prob(lineno, field, item.trim()))
        .collect()
}

fn parse_int(lineno: usize, field: &str, value: &str) -> Result<u64, ConfigError> {
    value
        .parse::<u64>()
        .map_err(|_| schema(lineno, format!("{field}: `{value}` is not a nonnegative integer")))
}

fn parse_nk(lineno: usize, item: &str) -> Result<(usize, usize), ConfigError> {
    let (n, k) = item
        .split_once('/')
        .ok_or_else(|| schema(lineno, format!("nk entry `{item}` must be N/K")))?;
    let n = parse_int(lineno, "nk", n.trim())? as usize;
    let k = parse_int(lineno, "nk", k.trim())? as usize;
    if k == 0 || n == 0 {
        return Err(schema(lineno, format!("nk entry `{item}`: N and K must be >= 1")));
    }
    if k > n {
        return Err(schema(
            lineno,
            format!("nk entry `{item}`: generation K={k} exceeds block N={n}"),
        ));
    }
    Ok((n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "\
# two links, one explicit and one calibrated
[channel.s1]
p_stay_good = 0.999
p_stay_bad = 0.818

[channel.s2]
pi_bad = 0.09311
zero_loss_prob = 0.5525
window = 10

[sweep]
n = 10
lb = 0, 0.2, 0.4, 0.6, 0.8, 1
dt = 0, 0.5, 1
nk = 10/2, 10/4, 10/10
q = 65536
mode = exact

[sweep]
nk = 20/10
lb = 0.5

[mc]
rounds = 50000
seed = 42
tolerance_sigma = 3

[output]
path = out.csv
format = csv
";

    #[test]
    fn parses_full_document() {
        let cfg = ScenarioConfig::parse(FULL).unwrap();
        assert_eq!(cfg.channels.len(), 2);
        assert_eq!(cfg.channels[0].0, "s1");
        assert_eq!(
            cfg.channels[0].1,
            ChannelSpecEntry::Explicit { p_stay_good: 0.999, p_stay_bad: 0.818 }
        );
        assert_eq!(
            cfg.channels[1].1,
            ChannelSpecEntry::Calibration { pi_bad: 0.09311, zero_loss_prob: 0.5525, window: 10 }
        );
        assert_eq!(cfg.sweeps.len(), 2);
        let s = &cfg.sweeps[0];
        assert_eq!(s.block_n, Some(10));
        assert_eq!(s.lb.len(), 6);
        assert_eq!(s.dt, vec![0.0, 0.5, 1.0]);
        assert_eq!(s.nk, vec![(10, 2), (10, 4), (10, 10)]);
        assert_eq!(s.field_size_q, 65536);
        assert_eq!(s.mode, NcMode::Exact);
        assert_eq!(cfg.sweeps[1].nk, vec![(20, 10)]);
        let mc = cfg.mc.unwrap();
        assert_eq!(mc.rounds, 50_000);
        assert_eq!(mc.seed, 42);
        assert_eq!(cfg.output.path.as_deref(), Some(std::path::Path::new("out.csv")));
        assert_eq!(cfg.output.format, OutputFormat::Csv);
        let paths = cfg.resolve_paths().unwrap();
        assert_eq!(paths.channel_1.p_stay_good(), 0.999);
        // The calibrated channel reproduces its targets.
        let st = paths.channel_2.stationary().unwrap();
        assert!((st.pi_bad - 0.09311).abs() < 1e-7);
        let z = paths.channel_2.loss_pmf(10).unwrap().mass()[0];
        assert!((z - 0.5525).abs() < 1e-7);
    }

    #[test]
    fn sweep_defaults() {
        let cfg = ScenarioConfig::parse(
            "[channel.a]\np_stay_good=1\np_stay_bad=0\n\
             [channel.b]\np_stay_good=1\np_stay_bad=0\n[sweep]\nlb=0.5\n",
        )
        .unwrap();
        let s = &cfg.sweeps[0];
        assert_eq!(s.field_size_q, 256);
        assert_eq!(s.mode, NcMode::Exact);
        assert_eq!(s.block_n, None);
        assert!(s.dt.is_empty() && s.nk.is_empty());
        assert!(cfg.mc.is_none());
        assert_eq!(cfg.output, OutputSpec::default());
    }

    fn expect_schema(text: &str, needle: &str) {
        match ScenarioConfig::parse(text) {
            Err(ConfigError::Schema { message, .. }) => {
                assert!(message.contains(needle), "`{message}` lacks `{needle}`")
            }
            other => panic!("expected schema error containing `{needle}`, got {other:?}"),
        }
    }

    const TWO_CH: &str = "[channel.a]\np_stay_good=1\np_stay_bad=0\n\
                          [channel.b]\np_stay_good=1\np_stay_bad=0\n";

    #[test]
    fn rejects_oversized_generation() {
        expect_schema(&format!("{TWO_CH}[sweep]\nnk = 10/12\n"), "K=12 exceeds block N=10");
    }

    #[test]
    fn rejects_out_of_range_probability() {
        let text = "[channel.a]\np_stay_good=1.5\np_stay_bad=0\n";
        match ScenarioConfig::parse(text) {
            Err(ConfigError::Range { line, field, value, .. }) => {
                assert_eq!((line, field.as_str(), value), (2, "p_stay_good", 1.5));
            }
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_structural_mistakes() {
        expect_schema("p_stay_good = 1\n", "key before any section");
        expect_schema("[channel.a]\nwhatever = 1\n", "unknown channel key");
        expect_schema("[nonsense]\n", "unknown section");
        expect_schema("[channel.a\n", "unterminated");
        expect_schema(&format!("{TWO_CH}[channel.a]\n"), "duplicate channel");
        expect_schema(&format!("{TWO_CH}[mc]\n[mc]\n"), "duplicate [mc]");
        expect_schema("[channel.a]\np_stay_good=1\np_stay_bad=0\n", "exactly two");
        expect_schema(
            "[channel.a]\np_stay_good=1\npi_bad=0.5\n",
            "mixes explicit parameters with calibration",
        );
        expect_schema(
            "[channel.a]\npi_bad=0.1\nzero_loss_prob=0.5\nwindow=1\n",
            "window must be >= 2",
        );
        expect_schema(&format!("{TWO_CH}[sweep]\nmode = magic\n"), "mode must be");
        expect_schema(&format!("{TWO_CH}[sweep]\nq = 100\n"), "not a supported");
        expect_schema(&format!("{TWO_CH}[mc]\nrounds = 0\n"), "rounds must be >= 1");
    }

    #[test]
    fn comments_and_whitespace_are_ignored()  {
        let cfg = ScenarioConfig::parse(
            "  [channel.a]  # first\n p_stay_good = 1 # inline\np_stay_bad=0\n\n\
             [channel.b]\np_stay_good=1\np_stay_bad=0\n# trailing comment\n",
        )
        .unwrap();
        assert_eq!(cfg.channels.len(), 2);
    }

    #[test]
    fn schema_errors_carry_line_numbers() {
        let err = ScenarioConfig::parse("[channel.a]\np_stay_good=1\nbogus\n").unwrap_err();
        assert_eq!(err.to_string(), "line 3: expected `key = value`");
    }
}
