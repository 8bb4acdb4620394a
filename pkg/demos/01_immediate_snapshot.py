"""One-shot immediate snapshot: run the level construction under a few
hand-picked schedules and show that every outcome is an ordered partition."""
from itersim import Schedule, enumerate_is_profiles, profile_to_partition, run_is_object


def pad(n, order, rounds=8):
    return Schedule(list(order) + [p for _ in range(rounds) for p in range(1, n + 1)])


def show(title, schedule):
    rec = run_is_object(3, schedule)
    print(f"{title}:")
    for p in sorted(rec.outputs):
        print(f"  process {p} sees {sorted(rec.outputs[p])}")


show("lock-step (everyone in one block)", pad(3, []))
show("strictly sequential (three singleton blocks)", pad(3, [1] * 8 + [2] * 8 + [3] * 8))
show("2 and 3 race, 1 trails", pad(3, [2, 3, 2, 3, 2, 3]))

profiles = enumerate_is_profiles(3)
partitions = {profile_to_partition((1, 2, 3), prof).blocks for prof in profiles}
print(f"\nexhaustive exploration: {len(partitions)} distinct ordered partitions"
      " (the Fubini number for n=3 is 13)")
