//! Command-line front end. Every command prints a `key=value` report and
//! returns exit status 0 exactly when the checks it ran all pass. Reports
//! never mention output paths or timings, so identical inputs and seeds give
//! byte-identical reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use fatflow::assembly::assemble;
use fatflow::block::{check_symmetries, transit_time, BlockPoint, OrbitOptions, OrbitOutcome, ShearProfile};
use fatflow::blueprint::{prong_census, validate_conditions, FatGraphBlueprint};
use fatflow::circle;
use fatflow::closure::{classify_flow, surgery_record, validate_gluing, ClosedManifold, GluingSpec};
use fatflow::lozenge::{
    bfs_chain_length, build_fat_tree, chain_along_path, skew_chain_connected, SkewConnection, SkewOrbit, BFS_DEPTH,
};
use fatflow::nhtree::{parse_tree, AxisError};
use fatflow::returnmap::{curves_csv, estimate_lambda0, CurveOptions, ReturnMapSystem, DEFAULT_KAPPA};
use fatflow::{parse_blueprint, parse_gluing, SectionPoint};

#[derive(Debug, Parser)]
#[command(name = "fatflow", version, about = "Build and certify flows from fat-graph blueprints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Block shear strength.
    #[arg(long, global = true, default_value_t = 50.0)]
    pub lambda: f64,
    /// Cone half-slope in the radian metric.
    #[arg(long, global = true, default_value_t = DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Cone grid per annulus side.
    #[arg(long, global = true, default_value_t = 200)]
    pub grid: usize,
    /// Generations (curves) or return steps (orbit).
    #[arg(long, global = true, default_value_t = 4)]
    pub gen: usize,
    /// Fat-tree radius or non-Hausdorff tree window.
    #[arg(long, global = true, default_value_t = 3)]
    pub radius: i64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the report copy and CSV artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the valence and polarity conditions.
    Validate { blueprint: PathBuf },
    /// Assemble the blocks and list transverse components.
    Assemble { blueprint: PathBuf },
    /// Check a gluing and classify the resulting flow.
    Classify { blueprint: PathBuf, gluing: PathBuf },
    /// Cone-field certificate for the return map.
    Cones { blueprint: PathBuf, gluing: PathBuf },
    /// Bisection for the smallest certifiable λ.
    Lambda0 { blueprint: PathBuf, gluing: PathBuf },
    /// Stable-curve generations and the density probe.
    Curves { blueprint: PathBuf, gluing: PathBuf },
    /// Block orbit from (x, y, z), or return-map orbits from seeded points
    /// when a blueprint and gluing are given.
    Orbit {
        #[arg(long, num_args = 3, allow_hyphen_values = true, value_names = ["X", "Y", "Z"])]
        start: Option<Vec<f64>>,
        blueprint: Option<PathBuf>,
        gluing: Option<PathBuf>,
    },
    /// Fat tree of lozenges and random chains on it.
    Fattree { blueprint: PathBuf },
    /// Chain connectivity of two orbits in the skewed strip, as d1 c1 d2 c2.
    Skew {
        #[arg(allow_hyphen_values = true)]
        d1: String,
        #[arg(allow_hyphen_values = true)]
        c1: String,
        #[arg(allow_hyphen_values = true)]
        d2: String,
        #[arg(allow_hyphen_values = true)]
        c2: String,
    },
    /// Non-Hausdorff tree queries.
    Nhtree {
        tree: PathBuf,
        /// Automorphism file; defaults to the periodic shift.
        #[arg(long)]
        automorphism: Option<PathBuf>,
        /// Report the block of a pair of points, as `x,y`.
        #[arg(long = "block")]
        blocks: Vec<String>,
    },
}

/// A finished command: report text, verdict, and artifacts to write.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub passed: bool,
    pub files: Vec<(String, String)>,
}

struct Report {
    text: String,
    passed: bool,
    files: Vec<(String, String)>,
}

impl Report {
    fn new(command: &str) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "command={command}");
        Report {
            text,
            passed: true,
            files: Vec::new(),
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}={value}");
    }

    fn raw(&mut self, block: &str) {
        self.text.push_str(block);
        if !block.ends_with('\n') {
            self.text.push('\n');
        }
    }

    fn check(&mut self, key: &str, ok: bool) {
        self.kv(key, ok);
        self.passed &= ok;
    }

    fn file(&mut self, name: &str, content: String) {
        self.kv("artifact", name);
        self.files.push((name.to_string(), content));
    }

    fn finish(mut self) -> Outcome {
        let verdict = self.passed;
        self.kv("passed", verdict);
        Outcome {
            report: self.text,
            passed: verdict,
            files: self.files,
        }
    }
}

fn read_input(rep: &mut Report, role: &str, path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {role} file {}", path.display()))?;
    rep.kv(&format!("input.{role}.sha256"), hex::encode(Sha256::digest(&bytes)));
    String::from_utf8(bytes).with_context(|| format!("{role} file {} is not UTF-8", path.display()))
}

fn load_blueprint(rep: &mut Report, path: &Path) -> Result<FatGraphBlueprint> {
    let text = read_input(rep, "blueprint", path)?;
    parse_blueprint(&text).map_err(|e| anyhow!("blueprint: {e}"))
}

fn load_gluing(rep: &mut Report, path: &Path) -> Result<GluingSpec> {
    let text = read_input(rep, "gluing", path)?;
    parse_gluing(&text).map_err(|e| anyhow!("gluing: {e}"))
}

fn load_system(rep: &mut Report, bp: &Path, gl: &Path, opts: &Opts) -> Result<Option<ReturnMapSystem>> {
    let bp = load_blueprint(rep, bp)?;
    let spec = load_gluing(rep, gl)?;
    let asm = assemble(&bp).map_err(|e| anyhow!("assembly: {e}"))?;
    match ClosedManifold::new(asm, &spec) {
        Ok(m) => Ok(Some(ReturnMapSystem::new(m, opts.lambda, opts.kappa)?)),
        Err(report) => {
            for f in &report.failures {
                rep.kv("gluing.failure", f);
            }
            rep.check("gluing.passed", false);
            Ok(None)
        }
    }
}

/// Runs a parsed command without touching stdout or the output directory.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    let rep = match &cli.command {
        Command::Validate { blueprint } => validate(blueprint)?,
        Command::Assemble { blueprint } => assemble_cmd(blueprint)?,
        Command::Classify { blueprint, gluing } => classify(blueprint, gluing)?,
        Command::Cones { blueprint, gluing } => cones(blueprint, gluing, o)?,
        Command::Lambda0 { blueprint, gluing } => lambda0(blueprint, gluing, o)?,
        Command::Curves { blueprint, gluing } => curves(blueprint, gluing, o)?,
        Command::Orbit {
            start,
            blueprint,
            gluing,
        } => orbit(start.as_deref(), blueprint.as_deref(), gluing.as_deref(), o)?,
        Command::Fattree { blueprint } => fattree(blueprint, o)?,
        Command::Skew { d1, c1, d2, c2 } => skew([d1, c1, d2, c2])?,
        Command::Nhtree {
            tree,
            automorphism,
            blocks,
        } => nhtree(tree, automorphism.as_deref(), blocks, o)?,
    };
    Ok(rep.finish())
}

/// Parses `args` (program name first), runs the command, prints the report
/// and writes artifacts. Returns the process exit status.
pub fn run<I, T>(args: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        let _ = e.print();
        anyhow!("invalid command line")
    })?;
    let outcome = execute(&cli)?;
    print!("{}", outcome.report);
    if let Some(dir) = &cli.opts.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        fs::write(dir.join("report.txt"), &outcome.report)?;
        for (name, content) in &outcome.files {
            fs::write(dir.join(name), content).with_context(|| format!("cannot write {name}"))?;
        }
    }
    Ok(if outcome.passed { 0 } else { 1 })
}

fn validate(path: &Path) -> Result<Report> {
    let mut rep = Report::new("validate");
    let bp = load_blueprint(&mut rep, path)?;
    let cycles = bp.trace_boundary_cycles();
    rep.kv("vertices", bp.vertices.len());
    rep.kv("edges", bp.edges.len());
    rep.kv("cycles", cycles.len());
    for (i, c) in cycles.iter().enumerate() {
        let sides: Vec<String> = c.sides.iter().map(|s| bp.side_name(s.side)).collect();
        rep.kv(&format!("cycle.{i}"), format!("k={} sides={}", c.len(), sides.join(",")));
    }
    match bp.resolve_polarity(&cycles) {
        None => {
            rep.kv("polarity", "none");
            rep.check("conditions.passed", false);
        }
        Some(pol) => {
            let names: Vec<String> = pol.iter().map(|p| p.to_string()).collect();
            rep.kv("polarity", names.join(","));
            let report = validate_conditions(&bp, &cycles, &pol);
            for v in &report.violations {
                rep.kv("violation", v);
            }
            rep.check("conditions.passed", report.passed());
        }
    }
    if let Ok(census) = prong_census(&bp) {
        for e in census {
            rep.kv(&format!("prongs.{}", e.vertex), e.prongs);
        }
    }
    Ok(rep)
}

fn assemble_cmd(path: &Path) -> Result<Report> {
    let mut rep = Report::new("assemble");
    let bp = load_blueprint(&mut rep, path)?;
    match assemble(&bp) {
        Err(e) => {
            rep.kv("assembly.error", e);
            rep.check("assembly.passed", false);
        }
        Ok(asm) => {
            rep.raw(&asm.report());
            for (i, c) in asm.components.iter().enumerate() {
                rep.kv(
                    &format!("seam_flips.{}", c.name()),
                    if asm.seam_flips_compose_to_identity(i) {
                        "identity"
                    } else {
                        "flip"
                    },
                );
            }
            rep.check("assembly.passed", true);
        }
    }
    Ok(rep)
}

fn classify(bpath: &Path, gpath: &Path) -> Result<Report> {
    let mut rep = Report::new("classify");
    let bp = load_blueprint(&mut rep, bpath)?;
    let spec = load_gluing(&mut rep, gpath)?;
    let asm = match assemble(&bp) {
        Ok(a) => a,
        Err(e) => {
            rep.kv("assembly.error", e);
            rep.check("assembly.passed", false);
            return Ok(rep);
        }
    };
    let gl = validate_gluing(&asm, &spec);
    for f in &gl.failures {
        rep.kv("gluing.failure", f);
    }
    rep.check("gluing.passed", gl.passed());
    for s in &spec.surgeries {
        match surgery_record(&bp, &s.vertex, s.meridian) {
            Ok(r) => rep.kv(
                &format!("surgery.{}", s.vertex),
                format!("meridian={},{} trivial={}", s.meridian.0, s.meridian.1, r.is_trivial()),
            ),
            Err(e) => rep.kv(&format!("surgery.{}", s.vertex), e),
        }
    }
    if let Ok(class) = classify_flow(&asm, &spec) {
        rep.kv("class", class.summary());
        rep.kv("class.kind", class.kind);
        rep.kv("class.one_prong_orbits", class.one_prong_count());
        for (v, p) in &class.singular {
            rep.kv(&format!("class.singular.{v}"), p);
        }
    }
    Ok(rep)
}

/// Finite-difference step and tolerance for the Jacobian spot check.
const FD_STEP: f64 = 1e-6;
const FD_TOL: f64 = 1e-5;
const FD_POINTS: usize = 20;

fn random_section_points(sys: &ReturnMapSystem, seed: u64, n: usize) -> Vec<SectionPoint> {
    let (grid, _) = sys.cone_grid(50);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| grid[rng.gen_range(0..grid.len())]).collect()
}

fn cones(bp: &Path, gl: &Path, o: &Opts) -> Result<Report> {
    let mut rep = Report::new("cones");
    let Some(sys) = load_system(&mut rep, bp, gl, o)? else {
        return Ok(rep);
    };
    rep.kv("kappa_max", format!("{:.9e}", sys.kappa_max()));
    let cr = sys.verify_cones(o.grid)?;
    rep.raw(&cr.to_text());
    rep.passed &= cr.passed();
    let mut worst: f64 = 0.0;
    for p in random_section_points(&sys, o.seed, FD_POINTS) {
        let j = sys.return_jacobian(p)?.matrix;
        let fd = sys.finite_difference_jacobian(p, FD_STEP)?;
        for r in 0..2 {
            for c in 0..2 {
                let scale = j[r][c].abs().max(1.0);
                worst = worst.max((j[r][c] - fd[r][c]).abs() / scale);
            }
        }
    }
    rep.kv("jacobian.fd_points", FD_POINTS);
    rep.kv("jacobian.fd_step", FD_STEP);
    rep.kv("jacobian.fd_tolerance", FD_TOL);
    rep.kv("jacobian.fd_max_rel_error", format!("{worst:.3e}"));
    rep.check("jacobian.passed", worst <= FD_TOL);
    if o.out.is_some() {
        rep.file("cones.csv", sys.cone_csv(o.grid)?);
    }
    Ok(rep)
}

fn lambda0(bp: &Path, gl: &Path, o: &Opts) -> Result<Report> {
    let mut rep = Report::new("lambda0");
    let Some(sys) = load_system(&mut rep, bp, gl, o)? else {
        return Ok(rep);
    };
    match estimate_lambda0(&sys, o.kappa, o.grid) {
        Err(e) => {
            rep.kv("lambda0.error", e);
            rep.check("lambda0.passed", false);
        }
        Ok(est) => {
            rep.kv("lambda0.kappa", est.kappa);
            rep.kv("lambda0.grid", format!("{0}x{0} per annulus", est.grid));
            rep.kv("lambda0.rel_tol", est.rel_tol);
            rep.kv("lambda0.iterations", est.iterations);
            rep.kv("lambda0.value", format!("{:.9e}", est.lambda0));
            rep.kv("lambda0.largest_failing", format!("{:.9e}", est.failing));
            let below = sys.with_lambda(0.9 * est.lambda0)?.verify_cones(o.grid)?;
            rep.check("lambda0.fails_at_0.9x", !below.passed());
        }
    }
    Ok(rep)
}

/// Box size (radians) of the density probe.
const DENSITY_DELTA: f64 = 0.1;

fn curves(bp: &Path, gl: &Path, o: &Opts) -> Result<Report> {
    let mut rep = Report::new("curves");
    let Some(sys) = load_system(&mut rep, bp, gl, o)? else {
        return Ok(rep);
    };
    rep.kv("curves.lambda", sys.lambda());
    rep.kv("curves.kappa", sys.kappa);
    let opts = CurveOptions::default();
    rep.kv("curves.h_max_rad", opts.h_max);
    rep.kv("curves.max_winding", opts.max_winding);
    let fams = match sys.stable_curves(o.gen, &opts) {
        Ok(f) => f,
        Err(e) => {
            rep.kv("curves.error", e);
            rep.check("curves.passed", false);
            return Ok(rep);
        }
    };
    for f in &fams {
        let graphs = f.curves.iter().all(|c| c.is_graph());
        rep.kv(
            &format!("curves.gen{}", f.generation),
            format!(
                "curves={} samples={} max_slope={:.9e} graphs={} outside_cone={}",
                f.curves.len(),
                f.sample_count(),
                f.max_slope,
                graphs,
                f.tangents_outside_cone
            ),
        );
        rep.passed &= graphs && f.tangents_outside_cone;
    }
    let d = sys.density_probe(DENSITY_DELTA, o.gen)?;
    rep.kv("density.delta_rad", d.delta);
    rep.kv("density.boxes", d.boxes);
    rep.kv("density.unresolved", d.unresolved);
    let fr = d.fractions();
    let shown: Vec<String> = fr.iter().map(|f| format!("{f:.6}")).collect();
    rep.kv("density.fractions", shown.join(","));
    rep.check("density.nondecreasing", fr.windows(2).all(|w| w[1] >= w[0]));
    let asm = &sys.manifold.assembled;
    if o.out.is_some() {
        rep.file("curves.csv", curves_csv(&fams, &|c| asm.components[c].name()));
    }
    Ok(rep)
}

const SYMMETRY_SAMPLES: usize = 100;

fn orbit(start: Option<&[f64]>, bp: Option<&Path>, gl: Option<&Path>, o: &Opts) -> Result<Report> {
    let mut rep = Report::new("orbit");
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    if let (Some(bp), Some(gl)) = (bp, gl) {
        let Some(sys) = load_system(&mut rep, bp, gl, o)? else {
            return Ok(rep);
        };
        rep.kv("orbit.lambda", sys.lambda());
        rep.kv("orbit.steps", o.gen);
        let mut csv = String::from("orbit,step,component,u,v\n");
        for (k, p) in random_section_points(&sys, o.seed, 5).into_iter().enumerate() {
            let (pts, stop) = sys.orbit(p, o.gen)?;
            for (s, q) in pts.iter().enumerate() {
                let name = sys.manifold.assembled.components[q.component].name();
                let _ = writeln!(csv, "{k},{s},{name},{:.12e},{:.12e}", q.u, q.v);
            }
            let last = pts.last().unwrap();
            rep.kv(
                &format!("orbit.{k}"),
                format!(
                    "start=({:.9},{:.9}) steps={} end=({:.9},{:.9}) stable_set={}",
                    p.u,
                    p.v,
                    pts.len() - 1,
                    last.u,
                    last.v,
                    stop.map_or("no".to_string(), |v| sys.manifold.assembled.blueprint.vertices[v].name.clone())
                ),
            );
        }
        if o.out.is_some() {
            rep.file("orbits.csv", csv);
        }
        return Ok(rep);
    }
    if bp.is_some() {
        bail!("orbit needs both a blueprint and a gluing, or neither");
    }
    let profile = ShearProfile::new(o.lambda)?;
    let s = match start {
        Some(v) => BlockPoint::new(v[0], v[1], v[2])?,
        None => BlockPoint::new(rng.gen_range(-1.4..1.4), rng.gen_range(0.0..1.0), -std::f64::consts::FRAC_PI_2)?,
    };
    let opts = OrbitOptions::default();
    rep.kv("orbit.lambda", profile.lambda());
    rep.kv("orbit.start", format!("({:.12},{:.12},{:.12})", s.x, s.y, s.z));
    rep.kv("orbit.step", opts.step);
    rep.kv("orbit.time_budget", opts.time_budget);
    let tr = profile.integrate_orbit(s, &opts)?;
    match tr.outcome {
        OrbitOutcome::Exited { time, x, y, .. } => {
            rep.kv("orbit.outcome", "exited");
            rep.kv("orbit.time", format!("{time:.12}"));
            rep.kv("orbit.exit", format!("({x:.12},{y:.12})"));
            if s.z == -std::f64::consts::FRAC_PI_2 {
                let dt = (time - transit_time(s.x)?).abs();
                let (_, ye) = profile.exit_map(s.x, s.y)?;
                let dy = circle::dist(y, ye);
                rep.kv("orbit.transit_error", format!("{dt:.3e}"));
                rep.kv("orbit.shear_error", format!("{dy:.3e}"));
                rep.check("orbit.closed_form", dt <= 1e-6 && dy <= 1e-6);
            }
        }
        OrbitOutcome::NonExiting { time, z } => {
            rep.kv("orbit.outcome", "non-exiting");
            rep.kv("orbit.time", format!("{time:.6}"));
            rep.kv("orbit.z", format!("{z:.12}"));
        }
    }
    let samples: Vec<BlockPoint> = (0..SYMMETRY_SAMPLES)
        .map(|_| {
            let h = std::f64::consts::FRAC_PI_2;
            BlockPoint::new(rng.gen_range(-h..h), rng.gen_range(0.0..1.0), rng.gen_range(-h..h)).unwrap()
        })
        .collect();
    let sym = check_symmetries(&profile, &samples);
    rep.kv("symmetry.samples", sym.samples);
    rep.kv("symmetry.rotation_residual", format!("{:.3e}", sym.rotation_residual));
    rep.kv("symmetry.reflection_residual", format!("{:.3e}", sym.reflection_residual));
    rep.check("symmetry.passed", sym.rotation_residual == 0.0 && sym.reflection_residual <= 1e-12);
    if o.out.is_some() {
        rep.file("trajectory.csv", tr.to_csv());
    }
    Ok(rep)
}

const RANDOM_CHAINS: usize = 100;

fn fattree(path: &Path, o: &Opts) -> Result<Report> {
    let mut rep = Report::new("fattree");
    let bp = load_blueprint(&mut rep, path)?;
    let patch = match build_fat_tree(&bp, o.radius) {
        Ok(p) => p,
        Err(e) => {
            rep.kv("fattree.error", e);
            rep.check("fattree.passed", false);
            return Ok(rep);
        }
    };
    rep.kv("fattree.radius", patch.radius);
    rep.kv("fattree.vertices", patch.vertices.len());
    rep.kv("fattree.edges", patch.edges.len());
    rep.check("fattree.is_tree", patch.is_tree());
    rep.check("fattree.labels_alternate", patch.labels_alternate());
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let n = patch.vertices.len();
    let (mut strings, mut s_sc, mut u_sc, mut long, mut both) = (0, 0, 0, 0, 0);
    if n >= 2 {
        for _ in 0..RANDOM_CHAINS {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let path = patch.path(a, b).expect("patch is connected");
            let chain = chain_along_path(&patch, &path)?;
            let st = chain.is_string();
            let sc = chain.scallop();
            if chain.len() >= 2 {
                long += 1;
                if st && sc != fatflow::lozenge::Scallop::Neither {
                    both += 1;
                }
            }
            strings += st as usize;
            match sc {
                fatflow::lozenge::Scallop::SScalloped => s_sc += 1,
                fatflow::lozenge::Scallop::UScalloped => u_sc += 1,
                fatflow::lozenge::Scallop::Neither => {}
            }
        }
        rep.kv("chains.sampled", RANDOM_CHAINS);
        rep.kv("chains.length_at_least_2", long);
        rep.kv("chains.strings", strings);
        rep.kv("chains.s_scalloped", s_sc);
        rep.kv("chains.u_scalloped", u_sc);
        rep.check("chains.exclusive", both == 0);
    }
    if o.out.is_some() {
        rep.file("fattree.txt", patch.to_edge_list());
    }
    Ok(rep)
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || anyhow!("`{s}` is not a rational of the form a or a/b");
    match s.split_once('/') {
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
    }
}

fn skew(args: [&String; 4]) -> Result<Report> {
    let mut rep = Report::new("skew");
    let v: Vec<Rational64> = args.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
    let a = SkewOrbit::new(v[0], v[1])?;
    let b = SkewOrbit::new(v[2], v[3])?;
    rep.kv("skew.a", a);
    rep.kv("skew.b", b);
    let (na, nb) = (a.nu(), b.nu());
    rep.kv("skew.nu_a", format!("({}, {})", na.0, na.1));
    rep.kv("skew.nu_b", format!("({}, {})", nb.0, nb.1));
    let verdict = skew_chain_connected(a, b);
    rep.kv("skew.criterion", verdict);
    let bfs = bfs_chain_length(a, b, BFS_DEPTH);
    rep.kv("skew.bfs_depth", BFS_DEPTH);
    rep.kv("skew.bfs", bfs.map_or("not reached".to_string(), |l| format!("length={l}")));
    let agree = match verdict {
        SkewConnection::NotConnected => bfs.is_none(),
        // beyond the search depth the oracle is silent
        c => bfs == c.length() || (bfs.is_none() && c.length().unwrap() > BFS_DEPTH),
    };
    rep.check("skew.agree", agree);
    Ok(rep)
}

fn nhtree(path: &Path, aut: Option<&Path>, blocks: &[String], o: &Opts) -> Result<Report> {
    let mut rep = Report::new("nhtree");
    let text = read_input(&mut rep, "tree", path)?;
    let tree = match parse_tree(&text, o.radius) {
        Ok(t) => t,
        Err(e) => {
            rep.kv("nhtree.invalid", e);
            rep.check("nhtree.valid", false);
            return Ok(rep);
        }
    };
    rep.check("nhtree.valid", true);
    rep.raw(&tree.summary());
    for spec in blocks {
        let (x, y) = spec
            .split_once(',')
            .ok_or_else(|| anyhow!("--block takes `x,y`, got `{spec}`"))?;
        let (x, y) = (tree.point(x)?, tree.point(y)?);
        let b = tree.block(x, y)?;
        let parts: Vec<String> = b
            .components
            .iter()
            .map(|c| format!("[{}]", c.iter().map(|&p| tree.name(p)).collect::<Vec<_>>().join(" ")))
            .collect();
        rep.kv(
            &format!("block.{},{}", tree.name(x), tree.name(y)),
            format!("d={} components={}", b.distance(), parts.join(" ")),
        );
    }
    let gamma = match aut {
        Some(p) => {
            let t = read_input(&mut rep, "automorphism", p)?;
            match tree.parse_automorphism(&t) {
                Ok(g) => Some(g),
                Err(e) => {
                    rep.kv("automorphism.invalid", e);
                    rep.check("automorphism.valid", false);
                    return Ok(rep);
                }
            }
        }
        None => tree.shift_automorphism().transpose()?,
    };
    let Some(gamma) = gamma else {
        return Ok(rep);
    };
    let names = |pts: &[usize]| pts.iter().map(|&p| tree.name(p)).collect::<Vec<_>>().join(",");
    let (fix, near) = tree.fix_sets(&gamma);
    rep.kv("fix", names(&fix));
    rep.kv("fix_tilde", names(&near));
    match tree.axis(&gamma) {
        Err(AxisError::FixedPoint(p)) => rep.kv("axis", format!("not defined: γ fixes {p}")),
        Err(e) => return Err(e.into()),
        Ok(ax) => {
            rep.raw(&ax.to_string());
            rep.kv("axis.members", names(&ax.points));
            rep.passed &= ax.inverse_agrees && ax.invariant && ax.union_formula;
            let ds: Vec<String> = ax
                .points
                .iter()
                .filter_map(|&x| gamma.apply(x).map(|y| (x, y)))
                .map(|(x, y)| Ok(format!("{}:{}", tree.name(x), tree.distance(x, y)?)))
                .collect::<Result<_>>()?;
            rep.kv("axis.translation_distances", ds.join(","));
        }
    }
    Ok(rep)
}
