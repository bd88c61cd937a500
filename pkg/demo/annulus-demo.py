'''
'''
from twistmean import library
from twistmean.zspace import AnnulusSpec, membership_test, characterize

ann = AnnulusSpec(2, 1)
model = library.thm33(2, 2, 1, 1)
print("Testing {} on {}".format(model.name, ann.to_dict()))

report = membership_test(model, ann, z_samples=6, s_per_z=2, threads=4)
print("vanishing means: {} (max {:.3g})".format(report.verdict,
                                                report.max_mean))

report = characterize(library.perturbed(2, 1, 1, 1), ann, [(1, 1)])
print("perturbed model: {} (residual {:.3g})".format(report.verdict,
                                                     report.max_residual))
