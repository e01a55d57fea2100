#pragma once

#include <stdexcept>
#include <string>

#include "ramc/characters.hpp"

namespace ramc::casbridge {

/// GP text for one (f, q) case. The body follows the survey program with the
/// loops removed; every quantity the fixture needs is printed on its own
/// `key=value` line so the output can be parsed without knowing GP syntax.
inline std::string build_case_script(long f, long q, int digits) {
    using characters::is_prime;
    if (!is_prime(f) || f % 4 != 1) throw std::invalid_argument("f must be a prime congruent to 1 mod 4");
    if (!is_prime(q) || q % 3 != 1) throw std::invalid_argument("q must be a prime congruent to 1 mod 3");
    if (f == q) throw std::invalid_argument("f and q must be distinct");
    if (digits < 50) throw std::invalid_argument("precision below 50 digits");

    std::string s;
    s += "{\n";
    s += "default(realprecision," + std::to_string(digits) + ");\n";
    s += "p=3;f=" + std::to_string(f) + ";q=" + std::to_string(q) + ";\n";
    s += R"GP(print("tool_version=",version());
Pk=x^2-f;k=bnfinit(Pk,1);Ck=k.clgp;
print("classgroup_k=",Ck[2]);
Ek=k.fu;Ak=lift(Ek[1]);Bk=polcoeff(Ak,0)+polcoeff(Ak,1)*sqrt(f);
LEke=2*log(abs(Bk));print("log_epsilon0=",LEke);
Q=polsubcyclo(q,p);K0=bnfinit(Q,1);print("classgroup_K0=",K0.clgp[2]);
PK=polcompositum(Pk,Q)[1];F=q*f;xK=real(polroots(PK)[2]);
K=bnfinit(PK,1);
print("PK=",Vec(PK));
print("classgroup_K=",K.clgp[2]);
print("kronecker=",kronecker(f,q));
GK=nfgaloisconj(K);Id=x;for(kk=1,6,Z=GK[kk];ks=1;while(Z!=Id,
Z=nfgaloisapply(K,GK[kk],Z);ks=ks+1);if(ks==2,S2=GK[kk];break));
EKe=List();EK=K.fu;for(n=1,#EK,e=EK[n];
ee=nfgaloisapply(K,S2,e);e=e*ee^-1;listput(EKe,e));
LEKe=List();for(n=1,#EKe,AK=lift(EKe[n]);BK=0;
for(m=0,5,c=polcoeff(AK,m);BK=BK+xK^m*c);
listput(LEKe,log(abs(BK))));
LEK=List();for(n=1,#LEKe,e=LEKe[n];if(abs(e)>10^-10,listput(LEK,e)));
for(n=1,#LEK,print("unit_log_",n,"=",LEK[n]));
g=lift(znprimroot(f));G=lift(znprimroot(q));
u=lift(Mod((1-g)/f,q));v=lift(Mod((1-G)/q,f));
g=g+u*f;G=G+v*q;g2=g^2;G3=G^3;d2=(f-1)/2;d3=(q-1)/3;
z=exp(I*Pi/F);A=List();for(i=1,d2,for(j=1,d3/2,
a=Mod(g2,F)^i*Mod(G3,F)^j;a=lift(a);listput(A,a)));dA=d2*d3/2;
LEtaK=List();C=List();for(i=1,3,for(j=1,2,c=1;for(t=1,dA,a=A[t];
s=lift(Mod(a*G^i*g^j,F));c=c*(z^s-z^-s));c=real(c);listput(C,c)));
listput(LEtaK,log(abs(C[1]*C[2]^-1)));
listput(LEtaK,log(abs(C[3]*C[4]^-1)));
listput(LEtaK,log(abs(C[5]*C[6]^-1)));
for(n=1,3,print("cyclotomic_log_",n,"=",LEtaK[n]));
if(#LEK==3,BX=12;for(j=1,3,for(a=-BX,BX,for(b=-BX,BX,for(c=-BX,BX,
X=a*LEK[1]+b*LEK[2]+c*LEK[3];
if(abs(X-LEtaK[j])<10^-6,print("relation_",j,"=",a," ",b," ",c))))));
print("epsilon0_lindep=",lindep([LEke,LEK[1],LEK[2],LEK[3]])));
print("end=",f," ",q);
}
)GP";
    return s;
}

}  // namespace ramc::casbridge
