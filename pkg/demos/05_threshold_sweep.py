"""How the labeling rule "hateful above N flagged posts" trades precision
for recall.

Sweeps the fixed-count cutoff on two synthetic datasets, one with crisp
per-post scores and one where a fifth of the posts are ambiguous. Raising
the cutoff always buys precision with recall; the ambiguous corpus pays
more for it.
"""

from hateagg import SynthConfig, generate, threshold_sweep

THRESHOLDS = [1, 3, 10, 50, 100]


def sweep_table(name: str, ambiguity: float) -> None:
    dataset = generate(
        SynthConfig(
            n_users=500,
            hate_fraction=0.3,
            p_in=0.05,
            p_out=0.005,
            posts_per_user=(40, 120),
            ambiguity=ambiguity,
            seed=2,
        )
    )
    print(f"--- {name} (ambiguity={ambiguity})")
    print("  threshold  precision  recall     f1")
    for row in threshold_sweep(dataset, THRESHOLDS, tau_t=0.5):
        print(
            f"  {row['threshold']:>9}  {row['precision']:>9.3f}"
            f"  {row['recall']:>6.3f}  {row['f1']:>5.3f}"
        )


def main() -> None:
    sweep_table("clean scores", ambiguity=0.0)
    sweep_table("noisy scores", ambiguity=0.2)


if __name__ == "__main__":
    main()
