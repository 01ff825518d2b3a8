use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spherelp::certify::{
    build_600cell_certificate, build_levenshtein_certificate, build_sharp_certificate, lp_bound_from_coeffs,
    projective_certificate, verify_600cell_domination_with, verify_600cell_pd_with, verify_certificate_text,
    AnyCertificate, Cell600System, CertificateFile,
};
use spherelp::config::{self, design_strength, energy, load_configuration};
use spherelp::descent::{self, compare_candidates, optimize_square_pyramid, DescentRun};
use spherelp::euclid1d::{self, OneDimCertificate};
use spherelp::exactfield::Number;
use spherelp::lpnum::{self, LpProblem};
use spherelp::{Error, Kernel, PointConfiguration, Potential};

#[derive(Parser, Debug)]
#[command(name = "spherelp", version, about = "Energy bounds, certificates and experiments for point configurations")]
pub struct Cli {
    /// Digits printed for floating-point values.
    #[arg(long, global = true, env = "SPHERELP_PRECISION", default_value_t = 12)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Configuration: `builtin:<name>` or a TOML file path.
    #[arg(long)]
    config: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy of a configuration under a potential.
    Energy {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Potential, e.g. inv:1, exp:2, pow4:3, log4, poly:1,0,2, sinv:1,1.
        #[arg(long)]
        potential: Potential,
        /// Arithmetic: exact over Q(sqrt5) when possible, or float.
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Kernel double sums S_1..S_max and the design strength.
    Design {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Largest kernel degree to test.
        #[arg(long, default_value_t = 12)]
        max: usize,
    },
    /// Sharp certificate by Hermite interpolation at the configuration's inner products.
    CertifySharp {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Potential, e.g. inv:1.
        #[arg(long)]
        potential: Potential,
        /// Arithmetic: exact over Q(sqrt5) when possible, or float.
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Interpolate only to first order at t = -1 (projective antipodal variant).
        #[arg(long)]
        antipodal: bool,
        /// Write the certificate file here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact 600-cell proof: positive-definiteness and domination functionals, and bounds for pow4:k.
    #[command(name = "certify-600cell")]
    Certify600cell {
        /// Check bound = energy for pow4:k, k = 0..=k_max.
        #[arg(long, default_value_t = 31)]
        k_max: u32,
        /// Threshold for the positive-definiteness functionals.
        #[arg(long, default_value_t = 32)]
        ell_pd: u32,
        /// Threshold for the domination functionals.
        #[arg(long, default_value_t = 36)]
        ell_dom: u32,
        /// Directory for one certificate file per k.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
    },
    /// Numerical linear-programming bound (or evaluation of given kernel coefficients).
    BoundLp {
        /// Ambient dimension n of S^{n-1}.
        #[arg(long)]
        dim: usize,
        /// Number of points N.
        #[arg(long)]
        points: usize,
        /// Potential, e.g. inv:0.5.
        #[arg(long)]
        potential: Potential,
        /// Highest kernel degree d.
        #[arg(long, default_value_t = 6)]
        degree: usize,
        /// Constraint grid size on [-1, t_max].
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Upper end of the constraint grid.
        #[arg(long, default_value_t = lpnum::DEFAULT_T_MAX)]
        t_max: f64,
        /// Evaluate these kernel coefficients alpha_0,alpha_1,... instead of solving.
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<f64>>,
        /// Compare with this configuration's energy (its inner products join the grid).
        #[arg(long)]
        config: Option<String>,
        /// Write the certificate file here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certificate from the roots of C_m + alpha C_{m-1}.
    BoundLevenshtein {
        /// Ambient dimension n of S^{n-1}.
        #[arg(long)]
        dim: usize,
        /// Number of interpolation nodes m.
        #[arg(long)]
        m: usize,
        /// Mixing parameter alpha.
        #[arg(long)]
        alpha: f64,
        /// Number of points N.
        #[arg(long)]
        points: usize,
        /// Potential, e.g. inv:0.5.
        #[arg(long)]
        potential: Potential,
        /// Write the certificate file here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded batch of projected gradient descents; prints a run log and basin summary.
    Descend {
        /// Ambient dimension n of S^{n-1}.
        #[arg(long)]
        dim: usize,
        /// Number of points N.
        #[arg(long)]
        points: usize,
        /// Potential, e.g. inv:1.
        #[arg(long)]
        potential: Potential,
        /// Number of seeds.
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        /// Iteration cap per run.
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        /// Stop when the tangent gradient norm is below this times the energy.
        #[arg(long, default_value_t = 1e-10)]
        grad_tol: f64,
    },
    /// Rank candidate configurations by energy.
    Compare {
        /// Candidate configuration; repeat for each candidate.
        #[arg(long = "config")]
        configs: Vec<String>,
        /// Potential, e.g. pow4:7.
        #[arg(long)]
        potential: Potential,
        /// Add the square pyramid on S^2 with optimized square height.
        #[arg(long)]
        square_pyramid: bool,
    },
    /// One-dimensional Euclidean construction and its verification.
    Euclid1d {
        /// Completely monotonic potential: exp:c, inv:s (s > 1/2) or sinv:s,c.
        #[arg(long)]
        potential: Potential,
        /// Series truncation K.
        #[arg(long, default_value_t = 2000)]
        terms: usize,
        /// Grid size for both checks.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        /// Write an (x, h, f(x^2)) table here.
        #[arg(long)]
        h_table: Option<PathBuf>,
        /// Write a (t, h^) table here.
        #[arg(long)]
        hhat_table: Option<PathBuf>,
    },
    /// Re-verify a certificate file.
    VerifyCert {
        /// Certificate file.
        path: PathBuf,
    },
}

enum Outcome {
    Ok,
    Failed,
}

struct Out {
    prec: usize,
    text: String,
}

impl Out {
    fn kv(&mut self, k: &str, v: impl std::fmt::Display) {
        self.text.push_str(&format!("{k} = {v}\n"));
    }

    fn num(&self, x: f64) -> String {
        format!("{x:.*}", self.prec)
    }

    fn number(&mut self, k: &str, v: &Number) {
        match v {
            Number::Exact(q) => {
                self.kv(k, q);
                let approx = self.num(v.to_f64());
                self.kv(&format!("{k}_approx"), approx);
            }
            Number::Float(x) => {
                let s = self.num(*x);
                self.kv(k, s);
            }
        }
    }

    fn raw(&mut self, s: &str) {
        self.text.push_str(s);
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(Error::from)
}

fn in_mode(c: PointConfiguration, mode: Mode) -> PointConfiguration {
    match mode {
        Mode::Exact => c,
        Mode::Float => c.to_float(),
    }
}

fn run(cli: Cli, out: &mut Out) -> Result<Outcome, Error> {
    match cli.command {
        Command::Energy { cfg, potential, mode } => {
            let c = in_mode(load_configuration(&cfg.config)?, mode);
            out.kv("config", c.label());
            out.kv("points", c.len());
            out.kv("potential", &potential);
            let e = energy(&c, &potential)?;
            out.number("energy", &e);
            Ok(Outcome::Ok)
        }
        Command::Design { cfg, max } => {
            let c = load_configuration(&cfg.config)?;
            let rep = design_strength(&c, max);
            out.kv("config", c.label());
            out.kv("kernel", c.geometry.kernel().describe());
            out.raw("i\tS_i\tzero\n");
            for (i, (s, z)) in rep.sums.iter().zip(&rep.zero).enumerate() {
                let v = if s.is_exact() { s.to_string() } else { out.num(s.to_f64()) };
                out.raw(&format!("{}\t{}\t{}\n", i + 1, v, z));
            }
            out.kv("strength", rep.strength);
            Ok(Outcome::Ok)
        }
        Command::CertifySharp { cfg, potential, mode, antipodal, output } => {
            let c = in_mode(load_configuration(&cfg.config)?, mode);
            let cert = if c.geometry.is_projective() {
                projective_certificate(&c, &potential, antipodal)?
            } else {
                if antipodal {
                    return Err(Error::InvalidInput("--antipodal applies to projective configurations".into()));
                }
                build_sharp_certificate(&c, &potential)?
            };
            out.kv("config", c.label());
            out.raw(&cert.report());
            let e = energy(&c, &potential)?;
            out.number("energy", &e);
            let sharp = match (&cert, &e) {
                (AnyCertificate::Exact(x), Number::Exact(v)) => &x.bound == v,
                _ => (cert.bound_f64() - e.to_f64()).abs() <= 1e-9 * e.to_f64().abs().max(1.0),
            };
            out.kv("sharp", sharp);
            if let Some(p) = output {
                write_file(&p, &cert.to_file().render())?;
                out.kv("written", p.display());
            }
            Ok(if cert.is_valid() { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Certify600cell { k_max, ell_pd, ell_dom, emit_dir } => {
            let sys = Cell600System::standard();
            let pd = verify_600cell_pd_with(&sys, ell_pd)?;
            let dom = verify_600cell_domination_with(&sys, ell_dom)?;
            out.raw("[positive definiteness]\n");
            out.raw(&pd.report());
            out.raw("[domination]\n");
            out.raw(&dom.report());
            out.kv("pd_functionals", format!("{}/{}", pd.checks.iter().filter(|c| c.passed).count(), pd.checks.len()));
            out.kv("domination_functionals", format!("{}/{}", dom.checks.iter().filter(|c| c.passed).count(), dom.checks.len()));
            let cfg = config::cell600();
            let mut all = pd.passed && dom.passed;
            out.raw("k\tbound\tenergy_equal\tpd\tdomination\n");
            if let Some(d) = &emit_dir {
                std::fs::create_dir_all(d)?;
            }
            for k in 0..=k_max {
                let cert = build_600cell_certificate(k)?;
                let e = energy(&cfg, &Potential::TruncatedPower(k))?;
                let equal = e == Number::Exact(cert.bound.clone());
                all &= equal && cert.is_valid();
                out.raw(&format!("{k}\t{}\t{}\t{}\t{}\n", cert.bound, equal, cert.pd_verified, cert.domination_verified));
                if let Some(d) = &emit_dir {
                    write_file(&d.join(format!("cell600_k{k}.toml")), &CertificateFile::from_certificate(&cert).render())?;
                }
            }
            out.kv("verdict", if all { "pass" } else { "FAIL" });
            Ok(if all { Outcome::Ok } else { Outcome::Failed })
        }
        Command::BoundLp { dim, points, potential, degree, grid, t_max, coeffs, config, output } => {
            let kernel = Kernel::sphere(dim);
            if let Some(c) = coeffs {
                let b = lp_bound_from_coeffs(&kernel, &c, points)?;
                out.kv("kernel", kernel.describe());
                out.kv("coefficients", c.len());
                let s = out.num(b);
                out.kv("bound", s);
                return Ok(Outcome::Ok);
            }
            let p = LpProblem::new(kernel, points, potential, degree, lpnum::uniform_grid(grid, t_max), t_max)?;
            let sol = match &config {
                Some(spec) => {
                    let c = load_configuration(spec)?;
                    let g = lpnum::evaluate_gap(&p, &c)?;
                    let e = out.num(g.energy);
                    out.kv("energy", e);
                    out.kv("relative_gap", format!("{:.3e}", g.relative_gap));
                    g.solution
                }
                None => lpnum::solve(&p)?,
            };
            let (r, cb) = (out.num(sol.raw_bound), out.num(sol.certified_bound));
            out.kv("raw_bound", r);
            out.kv("violation", format!("{:.3e}", sol.violation));
            out.kv("certified_bound", cb);
            out.kv("tail_ok", sol.tail_ok);
            out.kv("iterations", sol.iterations);
            let alpha: Vec<String> = sol.expansion.coeffs.iter().map(|a| format!("{a:.6e}")).collect();
            out.kv("alpha", format!("[{}]", alpha.join(", ")));
            let cert = sol.to_certificate(&p);
            if let Some(path) = output {
                write_file(&path, &CertificateFile::from_certificate(&cert).render())?;
                out.kv("written", path.display());
            }
            Ok(if cert.pd_verified && sol.tail_ok { Outcome::Ok } else { Outcome::Failed })
        }
        Command::BoundLevenshtein { dim, m, alpha, points, potential, output } => {
            let cert = build_levenshtein_certificate(dim, m, alpha, points, &potential)?;
            out.raw(&cert.report());
            if let Some(p) = output {
                write_file(&p, &CertificateFile::from_certificate(&cert).render())?;
                out.kv("written", p.display());
            }
            Ok(if cert.is_valid() { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Descend { dim, points, potential, seeds, first_seed, max_iter, grad_tol } => {
            let mut results = Vec::new();
            for seed in first_seed..first_seed + seeds {
                let mut run = DescentRun::random(dim, points, potential.clone(), seed)?;
                run.max_iter = max_iter;
                run.grad_tol = grad_tol;
                results.push((seed, descent::minimize(&run)?));
            }
            let cfgs: Vec<&PointConfiguration> = results.iter().map(|(_, r)| &r.config).collect();
            let classes = descent::classify(&cfgs, descent::DEDUP_TOL);
            let logs: Vec<descent::RunLog> = results
                .iter()
                .zip(&classes)
                .map(|((seed, r), &class)| descent::RunLog { seed: *seed, energy: r.energy, iterations: r.iterations, class })
                .collect();
            out.raw(&descent::render_run_log(&logs));
            let n_classes = classes.iter().max().map_or(0, |m| m + 1);
            out.raw("class\tenergy\tcount\n");
            for k in 0..n_classes {
                let members: Vec<&descent::RunLog> = logs.iter().filter(|l| l.class == k).collect();
                let e = out.num(members[0].energy);
                out.raw(&format!("{k}\t{e}\t{}\n", members.len()));
            }
            out.kv("classes", n_classes);
            Ok(Outcome::Ok)
        }
        Command::Compare { configs, potential, square_pyramid } => {
            let mut cands = configs.iter().map(|s| load_configuration(s)).collect::<Result<Vec<_>, _>>()?;
            if square_pyramid {
                let (z, _, c) = optimize_square_pyramid(&potential)?;
                out.kv("square_height", out.num(z));
                cands.push(c);
            }
            if cands.is_empty() {
                return Err(Error::InvalidInput("give at least one --config or --square-pyramid".into()));
            }
            let r = compare_candidates(&cands, &potential)?;
            out.raw("rank\tcandidate\tenergy\n");
            for (rank, &i) in r.order.iter().enumerate() {
                let e = out.num(r.energies[i]);
                out.raw(&format!("{}\t{}\t{e}\n", rank + 1, cands[i].label()));
            }
            out.kv("argmin", cands[r.argmin].label());
            out.kv("tie", r.tie);
            Ok(Outcome::Ok)
        }
        Command::Euclid1d { potential, terms, grid, h_table, hhat_table } => {
            let c = OneDimCertificate::new(&potential, terms)?;
            let v = euclid1d::verify_onedim(&c, grid)?;
            out.kv("potential", &potential);
            out.kv("terms", terms);
            out.raw(&v.report());
            if let Some(p) = h_table {
                let mut s = String::from("x\th\tf(x^2)\n");
                for (x, h, f) in euclid1d::h_table(&c, 10.0, 1001) {
                    s.push_str(&format!("{x:.6}\t{h:.12e}\t{f:.12e}\n"));
                }
                write_file(&p, &s)?;
            }
            if let Some(p) = hhat_table {
                let mut s = String::from("t\thhat\n");
                for (t, h) in euclid1d::hhat_table(&c, 1001) {
                    s.push_str(&format!("{t:.6}\t{h:.12e}\n"));
                }
                write_file(&p, &s)?;
            }
            Ok(if v.passed { Outcome::Ok } else { Outcome::Failed })
        }
        Command::VerifyCert { path } => {
            let text = std::fs::read_to_string(&path)?;
            let v = verify_certificate_text(&text)?;
            out.kv("file", path.display());
            out.raw(&v.report());
            Ok(if v.passed { Outcome::Ok } else { Outcome::Failed })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out { prec: cli.precision, text: String::new() };
    match run(cli, &mut out) {
        Ok(o) => {
            print!("{}", out.text);
            match o {
                Outcome::Ok => ExitCode::SUCCESS,
                Outcome::Failed => ExitCode::from(1),
            }
        }
        Err(e) => {
            print!("{}", out.text);
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
