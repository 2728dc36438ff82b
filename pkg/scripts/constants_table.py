"""Print the limit constants for m = 2, 4, 6 with their moment-identity residuals."""

from distmul import constants


def main():
    for m in (2, 4, 6):
        table = constants.constant_table(m, d=2)
        print(f"m = {m}")
        for name, v in table.entries.items():
            print(f"  {name:<20} {v.value: .15e}  +- {v.error:.1e}")
        rep = constants.identity_suite(m)
        worst = max(c["residual"] for c in rep["checks"])
        print(f"  identities: {'pass' if rep['pass'] else 'FAIL'} (worst residual {worst:.1e})")


if __name__ == "__main__":
    main()
