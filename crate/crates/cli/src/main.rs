use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use dblinst::cartesian::{check_product_actions_determined, validate_cartesian_instance, validate_cartesian_model};
use dblinst::collage::{close_collage, close_presented_category, copresheaf_to_instance, enumerate_natural_transformations, instance_to_copresheaf};
use dblinst::elements::{elements, is_discrete_opfibration, nabla};
use dblinst::instance::{count_instance_morphisms, validate_instance};
use dblinst::io::{emit_fixture, fixture_names, rebase_copresheaf, Document, Loader};
use dblinst::migration::{cartesian_factorize, check_initial, comprehensive_factorize, Migration};
use dblinst::sketch::{count_sketch_morphisms, flatten_cartesian_theory, flatten_theory, model_to_sketch_model, validate_sketch_model};
use dblinst::span_model::{enumerate_model_morphisms, validate_model, ModelMorphism, MorphismFilter};
use dblinst::theory_core::validate_theory;
use dblinst::{Config, Error, Report};

#[derive(Parser)]
#[command(name = "dblinst", version, about = "Models and instances of double theories over finite sets")]
struct Cli {
    /// Print reports as JSON documents.
    #[arg(long, global = true)]
    json_report: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Delta,
    Sigma,
    Pi,
}

#[derive(Subcommand)]
enum Verb {
    ValidateTheory {
        file: PathBuf,
    },
    ValidateModel {
        file: PathBuf,
    },
    ValidateInstance {
        file: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Write the presented collage of a model.
    Collage {
        model: PathBuf,
        #[arg(short, long, default_value = "collage.json")]
        out: PathBuf,
    },
    /// Close a presented category (or a model's collage) into a finite category.
    CloseCategory {
        file: PathBuf,
        #[arg(short, long, default_value = "category.json")]
        out: PathBuf,
    },
    ToCopresheaf {
        instance: PathBuf,
        #[arg(short, long, default_value = "copresheaf.json")]
        out: PathBuf,
    },
    FromCopresheaf {
        copresheaf: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(short, long, default_value = "instance.json")]
        out: PathBuf,
    },
    /// Write the projection from the model of elements.
    Elements {
        instance: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(short, long, default_value = "pi.json")]
        out: PathBuf,
    },
    Nabla {
        morphism: PathBuf,
        #[arg(short, long, default_value = "instance.json")]
        out: PathBuf,
    },
    /// Write `witness.json`, or `counterexample.json` and exit 1.
    CheckDopf {
        morphism: PathBuf,
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    Migrate {
        #[arg(long, value_enum)]
        mode: Mode,
        morphism: PathBuf,
        instance: PathBuf,
        #[arg(short, long, default_value = "migrated.json")]
        out: PathBuf,
    },
    /// Write `e.json`, `m.json`, `witness.json` and `instance.json`.
    Factorize {
        morphism: PathBuf,
        #[arg(long)]
        cartesian: bool,
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    CheckInitial {
        morphism: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
    },
    CheckCartesian {
        file: PathBuf,
    },
    /// Flatten a theory into a sketch, or a model into a sketch model.
    Flatten {
        file: PathBuf,
        #[arg(long)]
        cartesian: bool,
        #[arg(short, long, default_value = "sketch.json")]
        out: PathBuf,
    },
    CountMorphisms {
        source: PathBuf,
        target: PathBuf,
    },
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    Emit {
        name: String,
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    List,
}

/// How a verb finished when it did not fail outright.
enum Outcome {
    Done,
    Report(Report),
    Rejected,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = Config::from_env();
    if cfg.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let json = cli.json_report;
    match run(cli.verb, &Loader::new(cfg)) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        Ok(Outcome::Report(r)) => {
            if json {
                print!("{}", Document::Report(r.clone()).to_json());
            } else {
                print!("{r}");
            }
            ExitCode::from(if r.is_ok() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write(d: &Document, path: &Path) -> Result<(), Error> {
    d.write(path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(verb: Verb, cx: &Loader) -> Result<Outcome, Error> {
    let cfg = *cx.config();
    match verb {
        Verb::ValidateTheory { file } => Ok(Outcome::Report(validate_theory(&*cx.theory(file)?))),
        Verb::ValidateModel { file } => Ok(Outcome::Report(validate_model(&*cx.model(file)?))),
        Verb::ValidateInstance { file, model } => {
            let base = model.map(|m| cx.model(m)).transpose()?;
            Ok(Outcome::Report(validate_instance(&*cx.instance_over(file, base)?)))
        }
        Verb::Collage { model, out } => {
            let x = cx.model(model)?;
            let cc = close_collage(&x, cfg.max_word_len)?;
            write(&Document::PresentedCategory(cc.collage.presented), &out)?;
            Ok(Outcome::Done)
        }
        Verb::CloseCategory { file, out } => {
            let c = match cx.read(&file)? {
                Document::PresentedCategory(p) => close_presented_category(&p, cfg.max_word_len)?,
                Document::Model(x) => (*close_collage(&x, cfg.max_word_len)?.category).clone(),
                other => return Err(Error::Invalid(format!("expected a presented category or a model, found {}", other.kind()))),
            };
            write(&Document::FinCategory(Arc::new(c)), &out)?;
            Ok(Outcome::Done)
        }
        Verb::ToCopresheaf { instance, out } => {
            let h = cx.instance(instance)?;
            let cc = close_collage(&h.model, cfg.max_word_len)?;
            write(&Document::Copresheaf(instance_to_copresheaf(&h, &cc)?), &out)?;
            Ok(Outcome::Done)
        }
        Verb::FromCopresheaf { copresheaf, model, out } => {
            let Document::Copresheaf(p) = cx.read(&copresheaf)? else {
                return Err(Error::Invalid("expected a copresheaf document".into()));
            };
            let x = cx.model(model)?;
            let cc = close_collage(&x, cfg.max_word_len)?;
            let p = rebase_copresheaf(&p, &cc.category)?;
            write(&Document::Instance(Arc::new(copresheaf_to_instance(&p, &cc)?)), &out)?;
            Ok(Outcome::Done)
        }
        Verb::Elements { instance, model, out } => {
            let base = model.map(|m| cx.model(m)).transpose()?;
            let h = cx.instance_over(instance, base)?;
            write(&Document::ModelMorphism(elements(&h)?.projection), &out)?;
            Ok(Outcome::Done)
        }
        Verb::Nabla { morphism, out } => {
            // A witness document is used as given; a bare morphism is checked first.
            let (p, w) = match cx.read(&morphism)? {
                Document::DopfWitness(p, w) => (p, w),
                _ => {
                    let p = cx.model_morphism(morphism)?;
                    let w = is_discrete_opfibration(&p).map_err(|c| Error::NotDiscreteOpfibration(c.to_string()))?;
                    (p, w)
                }
            };
            write(&Document::Instance(Arc::new(nabla(&p, &w)?)), &out)?;
            Ok(Outcome::Done)
        }
        Verb::CheckDopf { morphism, out_dir } => {
            let p = cx.model_morphism(morphism)?;
            match is_discrete_opfibration(&p) {
                Ok(w) => {
                    write(&Document::DopfWitness(p, w), &out_dir.join("witness.json"))?;
                    Ok(Outcome::Done)
                }
                Err(c) => {
                    println!("not a discrete opfibration: {c}");
                    write(&Document::DopfCounterexample(c), &out_dir.join("counterexample.json"))?;
                    Ok(Outcome::Rejected)
                }
            }
        }
        Verb::Migrate { mode, morphism, instance, out } => {
            let alpha = cx.model_morphism(morphism)?;
            let over = match mode {
                Mode::Delta => alpha.target.clone(),
                Mode::Sigma | Mode::Pi => alpha.source.clone(),
            };
            let h = cx.instance_over(instance, Some(over))?;
            let mig = Migration::new(&alpha, &cfg)?;
            let k = match mode {
                Mode::Delta => mig.pullback(&h)?,
                Mode::Sigma => mig.lan(&h)?,
                Mode::Pi => mig.ran(&h)?,
            };
            write(&Document::Instance(Arc::new(k)), &out)?;
            Ok(Outcome::Done)
        }
        Verb::Factorize { morphism, cartesian, out_dir } => {
            let f = cx.model_morphism(morphism)?;
            let (fact, report) = if cartesian { cartesian_factorize(&f, &cfg, false)? } else { (comprehensive_factorize(&f, &cfg)?, Report::new()) };
            write(&Document::ModelMorphism(fact.e.clone()), &out_dir.join("e.json"))?;
            write(&Document::ModelMorphism(fact.m.clone()), &out_dir.join("m.json"))?;
            write(&Document::DopfWitness(fact.m.clone(), fact.witness.clone()), &out_dir.join("witness.json"))?;
            write(&Document::Instance(fact.instance.clone()), &out_dir.join("instance.json"))?;
            let mut r = report;
            if fact.e.compose(&fact.m)? != f {
                r.push("factorize.composite", "e·m", "composite differs from the input");
            }
            Ok(Outcome::Report(r))
        }
        Verb::CheckInitial { morphism, corpus } => {
            let e = cx.model_morphism(morphism)?;
            let qs = read_corpus(cx, &corpus)?;
            if qs.is_empty() {
                return Err(Error::Invalid(format!("no model morphisms in {}", corpus.display())));
            }
            Ok(Outcome::Report(check_initial(&e, &qs, &cfg)?))
        }
        Verb::CheckCartesian { file } => match cx.read(&file)? {
            Document::Model(x) => Ok(Outcome::Report(validate_cartesian_model(&x))),
            Document::Instance(h) => {
                let mut r = validate_cartesian_instance(&h);
                r.extend(check_product_actions_determined(&h));
                Ok(Outcome::Report(r))
            }
            other => Err(Error::Invalid(format!("expected a model or an instance, found {}", other.kind()))),
        },
        Verb::Flatten { file, cartesian, out } => {
            let flat = |t: &Arc<_>| if cartesian { flatten_cartesian_theory(t) } else { Ok(flatten_theory(t)) };
            match cx.read(&file)? {
                Document::Theory(t) => {
                    write(&Document::Sketch(Arc::new(flat(&t)?)), &out)?;
                    Ok(Outcome::Done)
                }
                Document::Model(x) => {
                    let s = Arc::new(flat(&x.theory)?);
                    let sm = model_to_sketch_model(&x, &s)?;
                    let r = validate_sketch_model(&sm);
                    write(&Document::SketchModel(sm), &out)?;
                    Ok(Outcome::Report(r))
                }
                other => Err(Error::Invalid(format!("expected a theory or a model, found {}", other.kind()))),
            }
        }
        Verb::CountMorphisms { source, target } => {
            let n = match (cx.read(&source)?, cx.read(&target)?) {
                (Document::Model(a), Document::Model(b)) => enumerate_model_morphisms(&a, &b, &MorphismFilter::default(), cfg.max_hom_card)?.len(),
                (Document::Instance(h), Document::Instance(k)) => count_instance_morphisms(&h, &k, cfg.max_hom_card)?,
                (Document::SketchModel(a), Document::SketchModel(b)) => count_sketch_morphisms(&a, &b, cfg.max_hom_card)?,
                (Document::Copresheaf(p), Document::Copresheaf(q)) => {
                    let q = rebase_copresheaf(&q, &p.base)?;
                    enumerate_natural_transformations(&p, &q, cfg.max_hom_card)?.len()
                }
                (a, b) => return Err(Error::Invalid(format!("cannot count morphisms from a {} to a {}", a.kind(), b.kind()))),
            };
            println!("{n}");
            Ok(Outcome::Done)
        }
        Verb::Fixtures { action: FixtureAction::List } => {
            for n in fixture_names() {
                println!("{n}");
            }
            Ok(Outcome::Done)
        }
        Verb::Fixtures { action: FixtureAction::Emit { name, out_dir } } => {
            let fx = emit_fixture(&name, &cfg)?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
            for (file, d) in &fx.documents {
                write(d, &out_dir.join(format!("{file}.json")))?;
            }
            Ok(Outcome::Done)
        }
    }
}

/// Every model morphism (or dopf witness) document in a directory, in
/// file name order.
fn read_corpus(cx: &Loader, dir: &Path) -> Result<Vec<ModelMorphism>, Error> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        match cx.read(&f)? {
            Document::ModelMorphism(q) | Document::DopfWitness(q, _) => out.push(q),
            _ => {}
        }
    }
    Ok(out)
}
