use std::fmt;
use std::fs;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use powerkit::audit::{audit, detect_family, parse_study_csv, AuditConfig};
use powerkit::effect_size::GroupSummary;
use powerkit::power::{Family, Tails};
use powerkit::report::{audit_csv, audit_text, curve_csv, fixed4, power_text, sample_size_text};
use powerkit_cli::api::{
    analyze, Analysis, AnalyzeRequest, AnovaGroups, DInput, DzInput, F2Input, FInput, PairedInput, Payload, RmSums,
    Study, TwoGroups, DEFAULT_ALPHA, DEFAULT_DROP_RATE, DEFAULT_TARGET_POWER,
};
use powerkit_cli::service;

/// Statistical power and sample size for t tests and ANOVA designs.
#[derive(Parser)]
#[command(name = "powerkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Power at the given sample size.
    Posthoc(AnalysisArgs),
    /// Minimum sample size for a target power, inflated for attrition.
    Apriori(AnalysisArgs),
    /// p-value and power over a range of N (paired-t).
    Curve(AnalysisArgs),
    /// Regenerate power, minimum N and final N for every row of a study CSV.
    Audit(AuditArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    IndependentT,
    PairedT,
    #[value(name = "oneway-anova")]
    OnewayAnova,
    RmWithin,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::IndependentT => Family::IndependentT,
            FamilyArg::PairedT => Family::PairedT,
            FamilyArg::OnewayAnova => Family::OneWayAnova,
            FamilyArg::RmWithin => Family::RmWithin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TailsArg {
    One,
    Two,
}

impl From<TailsArg> for Tails {
    fn from(t: TailsArg) -> Tails {
        match t {
            TailsArg::One => Tails::One,
            TailsArg::Two => Tails::Two,
        }
    }
}

#[derive(Args)]
struct Settings {
    /// Significance level.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "two")]
    tails: TailsArg,
    /// Target power for the sample-size search.
    #[arg(long, default_value_t = DEFAULT_TARGET_POWER)]
    power: f64,
    /// Expected attrition; final N = ceil(min N / (1 - drop rate)).
    #[arg(long, default_value_t = DEFAULT_DROP_RATE)]
    drop_rate: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct AnalysisArgs {
    #[arg(value_enum)]
    family: FamilyArg,

    // independent-t
    #[arg(long)]
    m1: Option<f64>,
    #[arg(long)]
    sd1: Option<f64>,
    #[arg(long)]
    n1: Option<u64>,
    #[arg(long)]
    m2: Option<f64>,
    #[arg(long)]
    sd2: Option<f64>,
    #[arg(long)]
    n2: Option<u64>,
    /// Cohen's d, instead of group summaries.
    #[arg(long)]
    d: Option<f64>,

    // paired-t
    #[arg(long)]
    mean_diff: Option<f64>,
    #[arg(long)]
    sd_diff: Option<f64>,
    /// Cohen's dz, instead of difference summaries.
    #[arg(long)]
    dz: Option<f64>,

    /// Number of pairs (paired-t) or total N (ANOVA families).
    #[arg(long)]
    n: Option<u64>,

    // one-way ANOVA
    /// One group as MEAN,SD,N; repeat per group.
    #[arg(long, value_parser = parse_group)]
    group: Vec<GroupSummary>,
    /// Within-group SD; defaults to the pooled estimate.
    #[arg(long)]
    sd_within: Option<f64>,
    /// Cohen's f, instead of group summaries.
    #[arg(long)]
    f: Option<f64>,
    /// Number of groups.
    #[arg(long)]
    k: Option<u64>,

    // repeated measures
    #[arg(long)]
    ss_effect: Option<f64>,
    #[arg(long)]
    ss_error: Option<f64>,
    /// f squared, instead of sums of squares.
    #[arg(long)]
    f2: Option<f64>,
    /// Number of measurements per subject.
    #[arg(long)]
    m: Option<u64>,
    /// Sphericity correction in [1/(m-1), 1].
    #[arg(long)]
    epsilon: Option<f64>,

    #[command(flatten)]
    settings: Settings,

    /// First N of a curve.
    #[arg(long)]
    n_min: Option<u64>,
    /// Last N of a curve.
    #[arg(long)]
    n_max: Option<u64>,

    /// Print the JSON response instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct AuditArgs {
    /// Study CSV.
    path: PathBuf,
    /// Column layout; detected from the header when omitted.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    #[arg(long, env = "POWERKIT_PORT", default_value_t = 8080)]
    port: u16,
}

/// Bad invocation; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_group(s: &str) -> Result<GroupSummary, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [mean, sd, n] = parts[..] else {
        return Err(format!("expected MEAN,SD,N, got `{s}`"));
    };
    let mean = mean.parse().map_err(|e| format!("mean `{mean}`: {e}"))?;
    let sd = sd.parse().map_err(|e| format!("sd `{sd}`: {e}"))?;
    let n = n.parse().map_err(|e| format!("n `{n}`: {e}"))?;
    GroupSummary::new(mean, sd, n).map_err(|e| e.to_string())
}

impl AnalysisArgs {
    /// Flags that were given, by name.
    fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("--m1", self.m1.is_some()),
            ("--sd1", self.sd1.is_some()),
            ("--n1", self.n1.is_some()),
            ("--m2", self.m2.is_some()),
            ("--sd2", self.sd2.is_some()),
            ("--n2", self.n2.is_some()),
            ("--d", self.d.is_some()),
            ("--mean-diff", self.mean_diff.is_some()),
            ("--sd-diff", self.sd_diff.is_some()),
            ("--dz", self.dz.is_some()),
            ("--n", self.n.is_some()),
            ("--group", !self.group.is_empty()),
            ("--sd-within", self.sd_within.is_some()),
            ("--f", self.f.is_some()),
            ("--k", self.k.is_some()),
            ("--ss-effect", self.ss_effect.is_some()),
            ("--ss-error", self.ss_error.is_some()),
            ("--f2", self.f2.is_some()),
            ("--m", self.m.is_some()),
            ("--epsilon", self.epsilon.is_some()),
        ];
        flags.into_iter().filter(|(_, on)| *on).map(|(name, _)| name).collect()
    }

    fn study(&self, analysis: Analysis) -> Result<Study> {
        let family = Family::from(self.family);
        let allowed: &[&str] = match family {
            Family::IndependentT => &["--m1", "--sd1", "--n1", "--m2", "--sd2", "--n2", "--d"],
            Family::PairedT => &["--mean-diff", "--sd-diff", "--dz", "--n"],
            Family::OneWayAnova => &["--group", "--sd-within", "--f", "--k", "--n"],
            Family::RmWithin => &["--ss-effect", "--ss-error", "--f2", "--k", "--m", "--n", "--epsilon"],
        };
        if let Some(extra) = self.present().into_iter().find(|f| !allowed.contains(f)) {
            return Err(usage(format!("{extra} does not apply to {family}")));
        }
        let post_hoc = analysis == Analysis::PostHoc;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("missing {name}")));
        let need_n = |v: Option<u64>, name: &str| v.ok_or_else(|| usage(format!("missing {name}")));
        let size = |v: Option<u64>, name: &str| -> Result<Option<u64>> {
            if post_hoc && v.is_none() {
                Err(usage(format!("post-hoc power needs {name}")))
            } else {
                Ok(v)
            }
        };

        Ok(match family {
            Family::IndependentT => match self.d {
                Some(d) => {
                    if [self.m1, self.sd1, self.m2, self.sd2].iter().any(Option::is_some) {
                        return Err(usage("--d excludes group summaries"));
                    }
                    Study::IndependentT {
                        payload: Payload::EffectSize(DInput {
                            d,
                            n1: size(self.n1, "--n1")?,
                            n2: size(self.n2, "--n2")?,
                        }),
                    }
                }
                None => Study::IndependentT {
                    payload: Payload::Summaries(TwoGroups {
                        group1: GroupSummary {
                            mean: need(self.m1, "--m1")?,
                            sd: need(self.sd1, "--sd1")?,
                            n: need_n(self.n1, "--n1")?,
                        },
                        group2: GroupSummary {
                            mean: need(self.m2, "--m2")?,
                            sd: need(self.sd2, "--sd2")?,
                            n: need_n(self.n2, "--n2")?,
                        },
                    }),
                },
            },
            Family::PairedT => match self.dz {
                Some(dz) => {
                    if self.mean_diff.is_some() || self.sd_diff.is_some() {
                        return Err(usage("--dz excludes difference summaries"));
                    }
                    Study::PairedT {
                        payload: Payload::EffectSize(DzInput {
                            dz,
                            n: size(self.n, "--n")?,
                        }),
                    }
                }
                None => Study::PairedT {
                    payload: Payload::Summaries(PairedInput {
                        mean_diff: need(self.mean_diff, "--mean-diff")?,
                        sd_diff: need(self.sd_diff, "--sd-diff")?,
                        n: size(self.n, "--n")?,
                    }),
                },
            },
            Family::OneWayAnova => match self.f {
                Some(f) => {
                    if !self.group.is_empty() || self.sd_within.is_some() {
                        return Err(usage("--f excludes group summaries"));
                    }
                    Study::OneWayAnova {
                        payload: Payload::EffectSize(FInput {
                            f,
                            k: need_n(self.k, "--k")?,
                            total_n: size(self.n, "--n")?,
                        }),
                    }
                }
                None => {
                    if self.group.len() < 2 {
                        return Err(usage("one-way ANOVA needs at least two --group MEAN,SD,N"));
                    }
                    if self.k.is_some() || self.n.is_some() {
                        return Err(usage("--k and --n are implied by the --group summaries"));
                    }
                    Study::OneWayAnova {
                        payload: Payload::Summaries(AnovaGroups {
                            groups: self.group.clone(),
                            sd_within: self.sd_within,
                        }),
                    }
                }
            },
            Family::RmWithin => {
                let epsilon = self.epsilon.unwrap_or(1.0);
                let (k, m) = (need_n(self.k, "--k")?, need_n(self.m, "--m")?);
                let total_n = size(self.n, "--n")?;
                match self.f2 {
                    Some(f_squared) => {
                        if self.ss_effect.is_some() || self.ss_error.is_some() {
                            return Err(usage("--f2 excludes sums of squares"));
                        }
                        Study::RmWithin {
                            payload: Payload::EffectSize(F2Input {
                                f_squared,
                                k,
                                m,
                                total_n,
                                epsilon,
                            }),
                        }
                    }
                    None => Study::RmWithin {
                        payload: Payload::Summaries(RmSums {
                            ss_effect: need(self.ss_effect, "--ss-effect")?,
                            ss_error: need(self.ss_error, "--ss-error")?,
                            k,
                            m,
                            total_n,
                            epsilon,
                        }),
                    },
                }
            }
        })
    }

    fn request(&self, analysis: Analysis) -> Result<AnalyzeRequest> {
        if analysis == Analysis::Curve {
            if !matches!(self.family, FamilyArg::PairedT) {
                return Err(usage("curves are defined for paired-t only"));
            }
            if self.n_min.is_none() || self.n_max.is_none() {
                return Err(usage("curve needs --n-min and --n-max"));
            }
        } else if self.n_min.is_some() || self.n_max.is_some() {
            return Err(usage("--n-min/--n-max apply to curve only"));
        }
        Ok(AnalyzeRequest {
            analysis,
            study: self.study(analysis)?,
            alpha: self.settings.alpha,
            tails: self.settings.tails.into(),
            target_power: self.settings.power,
            drop_rate: self.settings.drop_rate,
            n_min: self.n_min,
            n_max: self.n_max,
        })
    }
}

fn run_analysis(args: &AnalysisArgs, analysis: Analysis) -> Result<()> {
    let request = args.request(analysis)?;
    let response = analyze(&request)?;
    if args.json {
        println!("{}", serde_json::to_string(&response)?);
        return Ok(());
    }
    for w in &response.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &response.power {
        print!("{}", power_text(p));
    }
    if let Some(s) = &response.sample_size {
        let e = &response.effect;
        println!("effect size {}: {}", e.kind(), fixed4(e.value()));
        print!("{}", sample_size_text(s));
    }
    if let Some(c) = &response.curve {
        print!("{}", curve_csv(c));
    }
    Ok(())
}

fn run_audit(args: &AuditArgs) -> Result<()> {
    let content =
        fs::read_to_string(&args.path).map_err(|e| usage(format!("cannot read {}: {e}", args.path.display())))?;
    let family = match args.family {
        Some(f) => Family::from(f),
        None => {
            let header = content
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .unwrap_or("");
            detect_family(header).ok_or_else(|| {
                usage(format!(
                    "cannot detect the family from header `{header}`; pass --family"
                ))
            })?
        }
    };
    let rows = parse_study_csv(content.as_bytes(), family).with_context(|| args.path.display().to_string())?;
    let s = &args.settings;
    let config = AuditConfig {
        alpha: s.alpha,
        tails: s.tails.into(),
        target_power: s.power,
        drop_rate: s.drop_rate,
    };
    let report = audit(&rows, &config)?;
    match args.format {
        Format::Text => print!("{}", audit_text(&report)),
        Format::Csv => print!("{}", audit_csv(&report)),
    }
    Ok(())
}

fn run_serve(args: &ServeArgs) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let addr = SocketAddr::new(args.bind, args.port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, service::router())
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Posthoc(a) => run_analysis(a, Analysis::PostHoc),
        Command::Apriori(a) => run_analysis(a, Analysis::APriori),
        Command::Curve(a) => run_analysis(a, Analysis::Curve),
        Command::Audit(a) => run_audit(a),
        Command::Serve(a) => run_serve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("powerkit: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
