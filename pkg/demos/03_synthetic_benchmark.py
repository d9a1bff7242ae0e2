"""
Desk-scale benchmark on synthetic writers
=========================================

Ten synthetic writers, 15 genuine samples each and 10 forgeries drawn from
the other writers. Each trial enrolls 5 random references per writer and
scores 5 genuine and 5 forged tests; the EER is taken on pooled scores.
"""
import tempfile

from sigucss.evaluation import run_roc_experiments, run_table1_experiment
from sigucss.features import FeatureStore
from sigucss.synthetic import make_corpus, write_corpus

root = tempfile.mkdtemp(prefix="sigucss_demo_")
catalog, manifest = write_corpus(root, make_corpus(n_writers=10, seed=0))
print("corpus written to", manifest)

# features are extracted once and shared by every trial and method
store = FeatureStore()
report = run_table1_experiment(catalog, n_trials=10, seed=1, store=store)

print(f"{'method':10s} {'mean EER':>9s} {'std':>7s}")
for s in report:
    print(f"{s.method:10s} {s.mean_eer:9.3f} {s.std_eer:7.3f}")

# one larger partition for ROC curves (10 genuine + 10 forgeries per writer here)
curves = run_roc_experiments(catalog, ("shape", "fused"), seed=1, n_genuine=10,
                             n_forgery=10, store=store)
for m, c in curves.items():
    i = int(abs(c.far - c.frr).argmin())
    print(f"{m}: pooled EER {c.eer:.3f}; near-crossing point t={c.thresholds[i]:.3f} "
          f"FAR={c.far[i]:.3f} FRR={c.frr[i]:.3f}")
