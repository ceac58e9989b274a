#include <stdio.h>
#include "symforge.h"

int main(void) {
    SfClassicalSet *set = NULL;
    if (sf_classical_new(2, 4, &set) != SF_STATUS_INVALID_ARGUMENT) return 1;
    if (sf_last_error_message() == NULL) return 2;
    if (sf_classical_new(3, 2, &set) != SF_STATUS_OK) return 3;

    SfPhaseState s = {1.2, 0.2, 0.4, 0.8};
    double h = 0.0;
    if (sf_classical_eval(set, SF_FUNCTION_H, &s, 1.0, &h) != SF_STATUS_OK) return 4;
    char *text = NULL;
    if (sf_classical_text(set, SF_FUNCTION_O, &text) != SF_STATUS_OK) return 5;
    sf_string_free(text);
    sf_classical_free(set);

    SfTrajectory *traj = NULL;
    if (sf_integrate(3, 2, 1.0, &s, 10.0, 1e-10, 0.1, &traj) != SF_STATUS_OK) return 6;
    SfSample last;
    if (sf_trajectory_sample(traj, sf_trajectory_len(traj) - 1, &last) != SF_STATUS_OK) return 7;
    double drift = sf_trajectory_max_drift(traj);
    sf_trajectory_free(traj);

    double eig[3];
    if (sf_theta_levels(0.0, 400, 3, eig) != SF_STATUS_OK) return 8;

    printf("symforge %s H=%.12f t=%.2f drift=%.2e eig2=%.4f\n", sf_version(), h, last.t, drift, eig[2]);
    return drift < 1e-8 ? 0 : 9;
}
